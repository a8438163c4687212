#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#include "ckn_eigen.h"

#define CHECK(call)                                                        \
    do {                                                                   \
        enum CknStatus s_ = (call);                                        \
        if (s_ != CKN_STATUS_OK) {                                         \
            fprintf(stderr, "%s -> %d: %s\n", #call, (int)s_,              \
                    ckn_last_error_message());                             \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    CknSolver *solver = NULL;
    CknSequence *seq = NULL;
    size_t order = 0, len = 0;
    double lambdas[8];
    double c = 0.0;

    CHECK(ckn_hardy_constant(3, 1.0, &c));
    if (c != 1.0) return 2;
    if (ckn_critical_exponent(3, 2.5, &c) != CKN_STATUS_CONFIG) return 3;

    CHECK(ckn_solver_new_from_preset("gaussian-n3-a1", &solver));
    CHECK(ckn_solver_order(solver, &order));
    CHECK(ckn_solver_solve(solver, 3, &seq));
    CHECK(ckn_sequence_len(seq, &len));
    if (len != 3) return 4;
    if (ckn_sequence_eigenvalues(seq, lambdas, 2) != CKN_STATUS_BUFFER_TOO_SMALL) return 5;
    CHECK(ckn_sequence_eigenvalues(seq, lambdas, 8));

    double *v = malloc(order * sizeof *v);
    CHECK(ckn_sequence_eigenvector(seq, 0, v, order));
    free(v);

    printf("%s order=%zu lambda1=%.17g lambda3=%.17g\n", ckn_version(), order, lambdas[0], lambdas[2]);
    ckn_sequence_free(seq);
    ckn_solver_free(solver);
    return fabs(lambdas[0] - 4.78317) < 1e-3 ? 0 : 6;
}
