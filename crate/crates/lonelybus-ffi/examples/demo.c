/* Minimal C consumer of liblonelybus_ffi.
 *
 * Build (from the repository root, after `cargo build --release`):
 *
 *   cc crates/lonelybus-ffi/examples/demo.c \
 *      -Icrates/lonelybus-ffi/include \
 *      target/release/liblonelybus_ffi.a -lpthread -lm -ldl -o demo
 */
#include <stdio.h>
#include <stdlib.h>

#include "lonelybus.h"

static void check(LbStatus status, const char *what) {
    if (status != LB_STATUS_OK) {
        const char *msg = lb_last_error_message();
        fprintf(stderr, "%s failed (%d): %s\n", what, (int)status,
                msg ? msg : "no message");
        exit(1);
    }
}

int main(void) {
    LbPmf *pmf = NULL;
    check(lb_pmf_new(3, 3, &pmf), "lb_pmf_new");
    printf("lonely-count distribution for n=%u passengers on k=%u buses:\n",
           lb_pmf_n(pmf), lb_pmf_k(pmf));
    for (uint32_t s = 0; s <= lb_pmf_n(pmf); s++) {
        char *mass = NULL;
        double decimal = 0.0;
        check(lb_pmf_mass_rational(pmf, s, &mass), "lb_pmf_mass_rational");
        check(lb_pmf_mass_decimal(pmf, s, &decimal), "lb_pmf_mass_decimal");
        printf("  P(L = %u) = %-5s (%.6f)\n", s, mass, decimal);
        lb_string_free(mass);
    }
    char *tail = NULL;
    check(lb_pmf_tail_rational(pmf, 1, &tail), "lb_pmf_tail_rational");
    printf("  P(L >= 1) = %s\n", tail);
    lb_string_free(tail);
    lb_pmf_free(pmf);

    LbReport *report = NULL;
    check(lb_verify_theorem1(3, 2, 0, 2, &report), "lb_verify_theorem1");
    printf("existence proof at n=3, k=2: %zu claims, all pass: %s\n",
           lb_report_claim_count(report),
           lb_report_all_pass(report) ? "yes" : "no");
    lb_report_free(report);

    LbEstimate est;
    check(lb_estimate_tail(10, 5, 1, 100000, 42, 2, &est), "lb_estimate_tail");
    printf("sampled P(L >= 1) at n=10, k=5: %.5f in [%.5f, %.5f] "
           "(%llu/%llu hits, seed %llu)\n",
           est.point, est.ci_low, est.ci_high,
           (unsigned long long)est.hits, (unsigned long long)est.trials,
           (unsigned long long)est.seed);
    return 0;
}
