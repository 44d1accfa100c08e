#ifndef QTRAJ_H
#define QTRAJ_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QtrajStatus {
  QTRAJ_STATUS_OK = 0,
  QTRAJ_STATUS_NULL_POINTER = 1,
  QTRAJ_STATUS_DIMENSION_MISMATCH = 2,
  QTRAJ_STATUS_INVALID_MATRIX = 3,
  QTRAJ_STATUS_OUT_OF_DOMAIN = 4,
  QTRAJ_STATUS_INFEASIBLE = 5,
  QTRAJ_STATUS_TOO_LARGE = 6,
  QTRAJ_STATUS_INVALID_ARGUMENT = 7,
  QTRAJ_STATUS_PANIC = 8,
} QtrajStatus;

typedef struct QtrajDensity QtrajDensity;

typedef struct QtrajEnsemble QtrajEnsemble;

typedef struct QtrajHamiltonian QtrajHamiltonian;

typedef struct QtrajRecord {
  size_t l;
  size_t m;
  size_t n;
  double probability;
  double q_heat;
  double cl_heat;
  double s_qu;
  double s_cl;
} QtrajRecord;

typedef struct QtrajEnsembleStats {
  double avg_q_qu;
  double var_q_qu;
  double avg_q_cl;
  double var_q_cl;
  double avg_s_qu;
  double avg_s_cl;
  /**
   * Σ P e^{-s_irr}
   */
  double fluctuation_sum;
} QtrajEnsembleStats;

typedef struct QtrajEntropySplit {
  double total;
  double quantum;
  double classical;
} QtrajEntropySplit;

typedef struct QtrajProtocolReport {
  double delta_f_prot;
  double avg_w_ext;
  double avg_s_qu;
  double avg_s_cl;
  double avg_s_step4;
  double avg_q_qu;
  double avg_q_cl_step3;
  double avg_q_cl_step4;
  double avg_delta_u;
  double q_diss;
  double w_irr;
  double footprint_residual;
} QtrajProtocolReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next qtraj call on this thread.
 */
const char *qtraj_last_error_message(void);

/**
 * H = diag(levels).
 *
 * # Safety
 * `levels` must point to `dim` doubles and `out` to writable storage for one pointer.
 */
enum QtrajStatus qtraj_hamiltonian_new(const double *levels,
                                       size_t dim,
                                       struct QtrajHamiltonian **out);

/**
 * # Safety
 * `h` must come from `qtraj_hamiltonian_new` and not be used afterwards; null is ignored.
 */
void qtraj_hamiltonian_free(struct QtrajHamiltonian *h);

/**
 * ρ = Σ_l p_l |v_l><v_l| with the columns v_l of a row-major basis; `basis_im` may be null.
 *
 * # Safety
 * `probabilities` must hold `dim` doubles, `basis_re` (and `basis_im` if non-null) `dim * dim`.
 */
enum QtrajStatus qtraj_density_from_spectrum(const double *probabilities,
                                             const double *basis_re,
                                             const double *basis_im,
                                             size_t dim,
                                             struct QtrajDensity **out);

/**
 * ρ_θ = p Π[θ_-] + (1-p) Π[θ_+].
 *
 * # Safety
 * `out` must point to writable storage for one pointer.
 */
enum QtrajStatus qtraj_density_qubit(double p, double theta, struct QtrajDensity **out);

/**
 * Diagonal of ρ in the energy basis.
 *
 * # Safety
 * `rho` must be a live handle and `out` must hold its dimension in doubles.
 */
enum QtrajStatus qtraj_density_populations(const struct QtrajDensity *rho, double *out);

/**
 * # Safety
 * `rho` must come from a qtraj density constructor and not be used afterwards; null is ignored.
 */
void qtraj_density_free(struct QtrajDensity *rho);

/**
 * Thermalization ensemble of ρ̃ towards the thermal state of `h` at `temperature`.
 *
 * # Safety
 * `rho` and `h` must be live handles; `out` must point to writable storage for one pointer.
 */
enum QtrajStatus qtraj_ensemble_build(const struct QtrajDensity *rho,
                                      const struct QtrajHamiltonian *h,
                                      double temperature,
                                      struct QtrajEnsemble **out);

/**
 * Thermalization ensemble towards explicit reference populations.
 *
 * # Safety
 * `reference` must hold as many doubles as the dimension of `rho`.
 */
enum QtrajStatus qtraj_ensemble_build_with_reference(const struct QtrajDensity *rho,
                                                     const struct QtrajHamiltonian *h,
                                                     const double *reference,
                                                     struct QtrajEnsemble **out);

/**
 * # Safety
 * `ens` must be a live handle and `out` writable.
 */
enum QtrajStatus qtraj_ensemble_len(const struct QtrajEnsemble *ens, size_t *out);

/**
 * Record `index` in (l, m, n) lexicographic order.
 *
 * # Safety
 * `ens` must be a live handle and `out` writable.
 */
enum QtrajStatus qtraj_ensemble_record(const struct QtrajEnsemble *ens,
                                       size_t index,
                                       struct QtrajRecord *out);

/**
 * # Safety
 * `ens` must be a live handle and `out` writable.
 */
enum QtrajStatus qtraj_ensemble_stats(const struct QtrajEnsemble *ens,
                                      struct QtrajEnsembleStats *out);

/**
 * # Safety
 * `ens` must come from a qtraj ensemble constructor and not be used afterwards; null is ignored.
 */
void qtraj_ensemble_free(struct QtrajEnsemble *ens);

/**
 * D[ρ̃‖τ] split into D[ρ̃‖η̃] and D[η̃‖τ].
 *
 * # Safety
 * `rho` and `h` must be live handles and `out` writable.
 */
enum QtrajStatus qtraj_pythagorean_split(const struct QtrajDensity *rho,
                                         const struct QtrajHamiltonian *h,
                                         double temperature,
                                         struct QtrajEntropySplit *out);

/**
 * Qubit work extraction protocol; `n_steps` = 0 selects the quasistatic limit.
 *
 * # Safety
 * `out` must be writable.
 */
enum QtrajStatus qtraj_protocol_qubit_report(double p,
                                             double theta,
                                             double theta_tilde,
                                             double q1,
                                             double temperature,
                                             double omega0,
                                             size_t n_steps,
                                             struct QtrajProtocolReport *out);

/**
 * Null-terminated crate version.
 */
const char *qtraj_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QTRAJ_H */
