/* Exercises the C ABI from C: stock model, radius, oracle, Green values. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "treewalk.h"

#define CHECK(cond)                                                        \
    do {                                                                   \
        if (!(cond)) {                                                     \
            const char *msg = tw_last_error();                             \
            fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond, \
                    msg ? msg : "no error message");                       \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    TwModel *m = NULL;
    CHECK(tw_model_from_stock("srw_colored", &m) == TW_STATUS_OK);

    TwModelInfo info;
    CHECK(tw_model_info(m, &info) == TW_STATUS_OK);
    CHECK(info.period == 2 && info.range == 1);

    double r = 0.0;
    CHECK(tw_branch_point(m, &r) == TW_STATUS_OK);
    CHECK(fabs(r - 3.0 / (2.0 * sqrt(2.0))) < 1e-12);

    char *p = NULL;
    CHECK(tw_oracle_pn(m, "r", "r", 4, &p) == TW_STATUS_OK);
    CHECK(strcmp(p, "5/27") == 0);
    tw_string_free(p);

    TwComplex g, f;
    CHECK(tw_green(m, "r", "r", r, 0.0, &g, &f) == TW_STATUS_OK);
    CHECK(fabs(g.re - 4.0) < 1e-9 && fabs(g.im) < 1e-12);

    CHECK(tw_green(m, "r", "r", 2.0 * r, 0.0, &g, &f) == TW_STATUS_ARGUMENT);
    CHECK(tw_last_error() != NULL);
    CHECK(tw_model_from_stock("nope", &m) == TW_STATUS_ARGUMENT);

    tw_model_free(m);
    puts("ok");
    return 0;
}
