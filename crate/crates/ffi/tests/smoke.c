#include <math.h>
#include <stdio.h>
#include <string.h>

#include "hnslab.h"

#define CHECK(cond)                                                    \
    do {                                                               \
        if (!(cond)) {                                                 \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
            return 1;                                                  \
        }                                                              \
    } while (0)

int main(void) {
    HnsExponents e;
    CHECK(hns_critical_exponents(1.125, &e) == HNS_STATUS_OK);
    CHECK(e.delta == 0.25 && e.beta == 0.6875);
    CHECK(hns_critical_exponents(0.5, &e) == HNS_STATUS_INVALID_INPUT);
    CHECK(strstr(hns_last_error(), "gamma") != NULL);

    const char *doc =
        "{\"sim\": {\"grid\": 16, \"dt\": 0.001, \"t_end\": 0.005, \"record_every\": 1,"
        " \"theta\": {\"kind\": \"shell\", \"n\": 1}}}";
    HnsSpec *spec = NULL;
    CHECK(hns_spec_from_json(doc, &spec) == HNS_STATUS_OK);
    CHECK(hns_spec_validate(spec) == HNS_STATUS_OK);

    HnsField *v0 = NULL;
    CHECK(hns_spec_initial_field(spec, &v0) == HNS_STATUS_OK);
    CHECK(hns_field_grid(v0) == 16);
    double energy = 0.0;
    CHECK(hns_field_energy(v0, &energy) == HNS_STATUS_OK);
    CHECK(fabs(energy - 1.0) < 1e-12);

    HnsSimulation *sim = NULL;
    CHECK(hns_simulation_new(spec, HNS_MODE_STOCHASTIC, &sim) == HNS_STATUS_OK);
    HnsRecord *rec = NULL;
    CHECK(hns_simulation_run(sim, v0, 0, &rec) == HNS_STATUS_OK);
    CHECK(hns_record_len(rec) == 6);
    HnsRow row;
    CHECK(hns_record_row(rec, 5, &row) == HNS_STATUS_OK);
    CHECK(fabs(row.t - 0.005) < 1e-15 && row.l2 < 1.0);
    CHECK(hns_record_row(rec, 6, &row) == HNS_STATUS_OUT_OF_RANGE);
    CHECK(!hns_record_blowup(rec));

    char *csv = hns_record_csv(rec);
    CHECK(csv != NULL && strncmp(csv, "t,L2,Hr", 7) == 0);
    hns_string_free(csv);

    HnsField *last = NULL;
    CHECK(hns_record_final_field(rec, &last) == HNS_STATUS_OK);
    double c[6];
    int k[3] = {1, 0, 0};
    CHECK(hns_field_coefficient(last, k, c) == HNS_STATUS_OK);
    int far[3] = {9, 0, 0};
    CHECK(hns_field_coefficient(last, far, c) == HNS_STATUS_OUT_OF_RANGE);

    CHECK(hns_simulation_run(NULL, v0, 0, &rec) == HNS_STATUS_NULL_POINTER);

    hns_field_free(last);
    hns_record_free(rec);
    hns_simulation_free(sim);
    hns_field_free(v0);
    hns_spec_free(spec);
    printf("ok %s\n", hns_version());
    return 0;
}
