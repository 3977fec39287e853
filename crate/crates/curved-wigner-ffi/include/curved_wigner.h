#ifndef CURVED_WIGNER_H
#define CURVED_WIGNER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes mirroring the CLI exit codes.
 */
typedef enum CwStatus {
  CwStatus_Ok = 0,
  CwStatus_NullPointer = 1,
  CwStatus_ConfigError = 2,
  CwStatus_DomainError = 3,
  CwStatus_InvariantFailure = 4,
  CwStatus_InternalError = 5,
} CwStatus;

/**
 * Opaque scenario handle: parse once, run, read the result documents.
 */
typedef struct CwScenario CwScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Geodetic precession angle per orbit. `numeric` != 0 integrates the
 * transport equations instead of evaluating the closed form.
 *
 * # Safety
 * `out` must point to writable memory for one f64.
 */
enum CwStatus cw_geodetic_precession(double mass, double radius, int numeric, double *out);

/**
 * Closed-form first-order corrections on the circular orbit: covariant
 * velocity correction (4 components), covariant acceleration (4 components)
 * and the spin-up frame rotation rate, all per unit correction strength.
 *
 * # Safety
 * `out_dv` and `out_accel` must point to writable arrays of four f64;
 * `out_chi_up` to one f64.
 */
enum CwStatus cw_circular_corrections(double mass,
                                      double radius,
                                      double m_particle,
                                      double zeta,
                                      double phi,
                                      double t,
                                      double *out_dv,
                                      double *out_accel,
                                      double *out_chi_up);

/**
 * First-order orbital frequency shift coefficient omega_1.
 *
 * # Safety
 * `out_omega1` must point to writable memory for one f64.
 */
enum CwStatus cw_orbital_frequency_shift(double mass,
                                         double radius,
                                         double m_particle,
                                         double *out_omega1);

/**
 * Triplet admixture amplitude of the radially infalling singlet observed
 * from a single shared free-fall frame.
 *
 * # Safety
 * `out` must point to writable memory for one f64.
 */
enum CwStatus cw_radial_triplet_admixture(double mass, double r, double eps, double *out);

/**
 * Parse a JSON scenario config. Returns null when the document is invalid.
 *
 * # Safety
 * `config_json` must be a valid NUL-terminated UTF-8 string.
 */
struct CwScenario *cw_scenario_new(const char *config_json);

/**
 * Execute the scenario held by the handle.
 *
 * # Safety
 * `handle` must come from `cw_scenario_new` and not have been freed.
 */
enum CwStatus cw_scenario_run(struct CwScenario *handle);

/**
 * Manifest and tables of the last run as a JSON string; null before a run.
 * Free with `cw_string_free`.
 *
 * # Safety
 * `handle` must come from `cw_scenario_new` and not have been freed.
 */
char *cw_scenario_result_json(const struct CwScenario *handle);

/**
 * Release a scenario handle.
 *
 * # Safety
 * `handle` must come from `cw_scenario_new` and not have been freed before.
 */
void cw_scenario_free(struct CwScenario *handle);

/**
 * Release a string produced by this library.
 *
 * # Safety
 * `s` must have been returned by a cw_* function and not freed before.
 */
void cw_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CURVED_WIGNER_H */
