#ifndef HNSLAB_H
#define HNSLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HnsStatus {
  HNS_STATUS_OK = 0,
  HNS_STATUS_NULL_POINTER = 1,
  HNS_STATUS_INVALID_STRING = 2,
  // Config or argument rejected before running.
  HNS_STATUS_INVALID_INPUT = 3,
  // A run aborted: step rejected or non-finite state.
  HNS_STATUS_RUNTIME = 4,
  HNS_STATUS_IO = 5,
  HNS_STATUS_OUT_OF_RANGE = 6,
  HNS_STATUS_PANIC = 7,
} HnsStatus;

typedef enum HnsMode {
  HNS_MODE_DETERMINISTIC = 0,
  HNS_MODE_STOCHASTIC = 1,
  HNS_MODE_STOCHASTIC_CUTOFF = 2,
} HnsMode;

typedef struct HnsField HnsField;

typedef struct HnsRecord HnsRecord;

typedef struct HnsSimulation HnsSimulation;

typedef struct HnsSpec HnsSpec;

typedef struct HnsTable HnsTable;

typedef struct HnsExponents {
  double gamma;
  double delta;
  double p_critical;
  double beta;
} HnsExponents;

// One trajectory row, in the column order of the trajectory CSV.
typedef struct HnsRow {
  double t;
  double l2;
  double hr;
  double hgamma;
  double besov;
  double energy_defect;
  double cutoff_factor;
} HnsRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *hns_version(void);

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *hns_last_error(void);

// # Safety
// `out` must be valid for writes.
enum HnsStatus hns_critical_exponents(double gamma, struct HnsExponents *out);

// Parses an experiment document in JSON.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be valid for writes.
enum HnsStatus hns_spec_from_json(const char *json, struct HnsSpec **out);

// Reads an experiment document, TOML or JSON by extension.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be valid for writes.
enum HnsStatus hns_spec_from_path(const char *path, struct HnsSpec **out);

// Checks the simulation config and, when the document names one, the
// rules of its experiment kind.
//
// # Safety
// `spec` must be a live handle.
enum HnsStatus hns_spec_validate(const struct HnsSpec *spec);

// # Safety
// `spec` must be null or a handle not yet freed.
void hns_spec_free(struct HnsSpec *spec);

// Builds the document's initial field on its grid.
//
// # Safety
// `spec` must be a live handle; `out` must be valid for writes.
enum HnsStatus hns_spec_initial_field(const struct HnsSpec *spec, struct HnsField **out);

// Grid size `N` of the field, 0 for a null handle.
//
// # Safety
// `field` must be null or a live handle.
size_t hns_field_grid(const struct HnsField *field);

// `‖v‖²_{L²}`.
//
// # Safety
// `field` must be a live handle; `out` must be valid for writes.
enum HnsStatus hns_field_energy(const struct HnsField *field, double *out);

// Coefficient at wavevector `k[0..3]`, written to `out[0..6]` as
// `re0, im0, re1, im1, re2, im2`.
//
// # Safety
// `field` must be a live handle, `k` must point to 3 ints and `out` to 6
// writable doubles.
enum HnsStatus hns_field_coefficient(const struct HnsField *field, const int32_t *k, double *out);

// # Safety
// `field` must be null or a handle not yet freed.
void hns_field_free(struct HnsField *field);

// Prepares an integrator for the document's simulation config.
//
// # Safety
// `spec` must be a live handle; `out` must be valid for writes.
enum HnsStatus hns_simulation_new(const struct HnsSpec *spec,
                                  enum HnsMode mode,
                                  struct HnsSimulation **out);

// Runs sample `sample` from `v0`. A run stopped by the guard still
// succeeds; see [`hns_record_blowup`].
//
// # Safety
// `sim` and `v0` must be live handles; `out` must be valid for writes.
enum HnsStatus hns_simulation_run(struct HnsSimulation *sim,
                                  const struct HnsField *v0,
                                  uint64_t sample,
                                  struct HnsRecord **out);

// # Safety
// `sim` must be null or a handle not yet freed.
void hns_simulation_free(struct HnsSimulation *sim);

// Number of recorded rows, 0 for a null handle.
//
// # Safety
// `rec` must be null or a live handle.
size_t hns_record_len(const struct HnsRecord *rec);

// # Safety
// `rec` must be a live handle; `out` must be valid for writes.
enum HnsStatus hns_record_row(const struct HnsRecord *rec, size_t index, struct HnsRow *out);

// Whether the run crossed its guard.
//
// # Safety
// `rec` must be null or a live handle.
bool hns_record_blowup(const struct HnsRecord *rec);

// Copy of the final field.
//
// # Safety
// `rec` must be a live handle; `out` must be valid for writes.
enum HnsStatus hns_record_final_field(const struct HnsRecord *rec, struct HnsField **out);

// Trajectory CSV as a new string; release it with [`hns_string_free`].
// Returns null for a null handle.
//
// # Safety
// `rec` must be null or a live handle.
char *hns_record_csv(const struct HnsRecord *rec);

// # Safety
// `rec` must be null or a handle not yet freed.
void hns_record_free(struct HnsRecord *rec);

// # Safety
// `s` must be null or a string returned by this library and not yet freed.
void hns_string_free(char *s);

// Runs the experiment named by the document's `kind` with `workers`
// threads (0 picks the default).
//
// # Safety
// `spec` must be a live handle; `out` must be valid for writes.
enum HnsStatus hns_experiment_run(const struct HnsSpec *spec,
                                  size_t workers,
                                  struct HnsTable **out);

// # Safety
// `table` must be null or a live handle.
size_t hns_table_rows(const struct HnsTable *table);

// # Safety
// `table` must be null or a live handle.
size_t hns_table_columns(const struct HnsTable *table);

// Name of column `col`, owned by the table; null when out of range.
//
// # Safety
// `table` must be null or a live handle.
const char *hns_table_column_name(const struct HnsTable *table, size_t col);

// # Safety
// `table` must be a live handle; `out` must be valid for writes.
enum HnsStatus hns_table_value(const struct HnsTable *table, size_t row, size_t col, double *out);

// CSV text of the table, owned by the table.
//
// # Safety
// `table` must be null or a live handle.
const char *hns_table_csv(const struct HnsTable *table);

// Writes the CSV and its `.meta.json` sidecar under `outdir`.
//
// # Safety
// `table` and `spec` must be live handles and `outdir` a NUL-terminated
// string.
enum HnsStatus hns_table_write(const struct HnsTable *table,
                               const struct HnsSpec *spec,
                               const char *outdir);

// # Safety
// `table` must be null or a handle not yet freed.
void hns_table_free(struct HnsTable *table);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HNSLAB_H */
