mod common;

use common::decomposition_bijection;

#[test]
fn nearest_neighbour_walks_up_to_length_8() {
    for x in ["ab", "abc", "abca"] {
        let s = decomposition_bijection("srw_free", x, 8).unwrap();
        assert!(s.paths > 0 && s.chains > 0, "{x}: {s:?}");
    }
}

#[test]
fn colored_nearest_neighbour_walks() {
    let s = decomposition_bijection("srw_colored", "r.0.1.1", 8).unwrap();
    assert!(s.paths > 0);
}

#[test]
fn range_two_walks() {
    for x in ["abc", "abcab"] {
        decomposition_bijection("mu", x, 6).unwrap();
    }
}
