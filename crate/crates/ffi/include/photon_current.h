#ifndef PHOTON_CURRENT_H
#define PHOTON_CURRENT_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every `pc_*` call.
 */
typedef enum PcStatus {
  PC_STATUS_OK = 0,
  PC_STATUS_NULL_POINTER = 1,
  PC_STATUS_INVALID_ARGUMENT = 2,
  PC_STATUS_PARSE = 3,
  PC_STATUS_VALIDATION = 4,
  PC_STATUS_GRID = 5,
  PC_STATUS_DOMAIN = 6,
  PC_STATUS_NUMERICAL = 7,
  PC_STATUS_PORT = 8,
  PC_STATUS_BUFFER_SIZE = 9,
  PC_STATUS_PANIC = 10,
} PcStatus;

/**
 * Result of running a netlist.
 */
typedef struct PcCircuit PcCircuit;

/**
 * One-photon spectral state.
 */
typedef struct PcState PcState;

/**
 * 0 = natural units, 1 = SI.
 */
typedef int32_t PcUnits;

/**
 * Normal-incidence interface coefficients.
 */
typedef struct PcFresnel {
  double r_re;
  double r_im;
  double t_re;
  double t_im;
  double reflectance;
  double transmittance;
  /**
   * reflectance + transmittance − 1
   */
  double defect;
} PcFresnel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread. Valid until the next
 * failing call on the same thread; never null.
 */
const char *pc_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from a `pc_*` function and not be freed twice.
 */
void pc_string_free(char *s);

/**
 * Unit-number Gaussian centred at `x0` with helicity ±1.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum PcStatus pc_state_gaussian(uintptr_t n,
                                double dk,
                                double area,
                                PcUnits units,
                                double k0,
                                double sigma,
                                double x0,
                                int32_t helicity,
                                struct PcState **out_state);

/**
 * Parses `{N,dk,area,helicity,re,im}` or `{"gaussian":{...}}`. Gaussian
 * specs use the grid given here; explicit spectra carry their own, but the
 * given grid must still be valid.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out_state` a valid pointer.
 */
enum PcStatus pc_state_from_json(const char *json,
                                 uintptr_t n,
                                 double dk,
                                 double area,
                                 PcUnits units,
                                 struct PcState **out_state);

/**
 * # Safety
 * `state` must be a live handle or null; `out_json` a valid pointer.
 * Free the result with [`pc_string_free`].
 */
enum PcStatus pc_state_to_json(const struct PcState *state, char **out_json);

/**
 * # Safety
 * `state` must come from this library and not be freed twice.
 */
void pc_state_free(struct PcState *state);

/**
 * # Safety
 * Pointers must be valid.
 */
enum PcStatus pc_state_len(const struct PcState *state, uintptr_t *out_len);

/**
 * # Safety
 * Pointers must be valid.
 */
enum PcStatus pc_state_photon_number(const struct PcState *state, double *out_number);

/**
 * New handle holding the state freely evolved by `dt`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum PcStatus pc_state_evolve(const struct PcState *state, double dt, struct PcState **out_state);

/**
 * ⟨a|b⟩ from the k-space sum (`x_space == false`) or from the fields on
 * the hyperplane at time `t`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum PcStatus pc_scalar_product(const struct PcState *a,
                                const struct PcState *b,
                                bool x_space,
                                double t,
                                double *out_re,
                                double *out_im);

/**
 * Writes ρ(x_i, t) for the N grid points into `buffer`.
 *
 * # Safety
 * `buffer` must hold `len` doubles.
 */
enum PcStatus pc_density(const struct PcState *state, double t, double *buffer, uintptr_t len);

/**
 * Positive-frequency density of the 1D localized state.
 *
 * # Safety
 * Pointers must be valid.
 */
enum PcStatus pc_localized_density_1d(double u,
                                      double k_max,
                                      double area,
                                      double *out_re,
                                      double *out_im);

/**
 * Positive-frequency density of the 3D localized state at radius `r`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum PcStatus pc_localized_density_3d(double r,
                                      double dt,
                                      double k_max,
                                      PcUnits units,
                                      double *out_re,
                                      double *out_im);

/**
 * Interface coefficients from n1 into n2. `paper_convention` selects the
 * literal `((n−1)/(n+1), 2n/(n+1))` pair.
 *
 * # Safety
 * `out_coeffs` must be valid.
 */
enum PcStatus pc_fresnel(double n1_re,
                         double n1_im,
                         double n2_re,
                         double n2_im,
                         bool paper_convention,
                         struct PcFresnel *out_coeffs);

/**
 * Validates and runs a netlist. Relative medium-table paths resolve
 * against the working directory.
 *
 * # Safety
 * `netlist_json` must be NUL-terminated; `out_circuit` valid.
 */
enum PcStatus pc_circuit_run(const char *netlist_json,
                             uintptr_t n,
                             double dk,
                             double area,
                             PcUnits units,
                             struct PcCircuit **out_circuit);

/**
 * # Safety
 * `circuit` must come from this library and not be freed twice.
 */
void pc_circuit_free(struct PcCircuit *circuit);

/**
 * Click probability at a detector port.
 *
 * # Safety
 * Pointers must be valid; `port` NUL-terminated.
 */
enum PcStatus pc_circuit_probability(const struct PcCircuit *circuit,
                                     const char *port,
                                     double *out_p);

/**
 * # Safety
 * Pointers must be valid.
 */
enum PcStatus pc_circuit_absorbed(const struct PcCircuit *circuit, double *out_absorbed);

/**
 * Largest |in − out − absorbed| over the ledger rows.
 *
 * # Safety
 * Pointers must be valid.
 */
enum PcStatus pc_circuit_ledger_imbalance(const struct PcCircuit *circuit, double *out_imbalance);

/**
 * Full results record as JSON, with `samples` seeded detection draws.
 *
 * # Safety
 * Pointers must be valid. Free the result with [`pc_string_free`].
 */
enum PcStatus pc_circuit_results_json(const struct PcCircuit *circuit,
                                      uint64_t seed,
                                      uint64_t samples,
                                      char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PHOTON_CURRENT_H */
