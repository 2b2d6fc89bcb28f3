/* Exercises the generated header and the shared library from plain C. */
#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include "qd3.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            char msg[256];                                            \
            qd3_last_error_message(msg, sizeof msg);                  \
            fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__,   \
                    #cond, msg);                                      \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    Qd3Params *params = NULL;
    CHECK(qd3_params_default(1, &params) == QD3_STATUS_OK);
    CHECK(qd3_params_n_sites(params) == 1);

    size_t len = 0;
    Qd3Complex u = {0.3, 0.1};
    CHECK(qd3_local_operator(params, QD3_LOCAL_OPERATOR_R_VECTOR, u, NULL, 0, &len) ==
          QD3_STATUS_BUFFER_TOO_SMALL);
    CHECK(len == 36 * 36);
    Qd3Complex *r = malloc(len * sizeof *r);
    CHECK(qd3_local_operator(params, QD3_LOCAL_OPERATOR_R_VECTOR, u, r, len, &len) == QD3_STATUS_OK);
    free(r);

    Qd3Chain *chain = NULL;
    CHECK(qd3_chain_new(params, &chain) == QD3_STATUS_OK);
    size_t d = qd3_chain_dim(chain);
    Qd3Complex *t = malloc(d * d * sizeof *t);
    CHECK(qd3_chain_transfer(chain, u, t, d * d, &len) == QD3_STATUS_OK);
    free(t);
    qd3_chain_free(chain);

    Qd3Report *report = NULL;
    CHECK(qd3_verify(params, QD3_SCOPE_LOCAL, 1, &report) == QD3_STATUS_OK);
    CHECK(qd3_report_passed(report) == 1);
    CHECK(strstr(qd3_report_json(report), "\"schema\": \"qd3/1\"") != NULL);
    printf("records %zu\n", qd3_report_record_count(report));
    qd3_report_free(report);

    CHECK(qd3_bae(params, 2, 0, 0, 4, 8, 40.0, &report) == QD3_STATUS_COUNTING_RULE);
    CHECK(qd3_last_error_message(NULL, 0) > 0);

    qd3_params_free(params);
    printf("ok %s\n", qd3_version());
    return 0;
}
