#ifndef NONMARKOV_H
#define NONMARKOV_H

/* Generated by cbindgen from the nonmarkov-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible call.
typedef enum NmStatus {
  NM_STATUS_OK = 0,
  // A parameter lies outside the domain of the operation.
  NM_STATUS_DOMAIN = 1,
  // The self-energy was evaluated exactly on its branch cut.
  NM_STATUS_BRANCH_CUT = 2,
  // The time-domain solution left the physical region.
  NM_STATUS_SOLVER_INSTABILITY = 3,
  // An internal consistency check failed.
  NM_STATUS_CONSISTENCY = 4,
  // Adaptive quadrature did not converge.
  NM_STATUS_QUADRATURE = 5,
  // A Fock-space truncation was too small.
  NM_STATUS_TRUNCATION = 6,
  // Master-equation coefficients are singular in the window.
  NM_STATUS_SINGULAR_WINDOW = 7,
  // A scenario failed to parse or validate.
  NM_STATUS_SCENARIO = 8,
  // An I/O operation failed.
  NM_STATUS_IO = 9,
  // A required pointer argument was null.
  NM_STATUS_NULL_POINTER = 10,
  // A panic was caught at the boundary.
  NM_STATUS_PANIC = 11,
} NmStatus;

// An opaque reservoir spectral-density model.
typedef struct NmModel NmModel;

// An opaque solved trajectory: u(t) and v(t) on a uniform grid.
typedef struct NmSolution NmSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string. Do not free.
const char *nm_version(void);

// Create a finite-band waveguide reservoir model J(ω) = η²√(4ξ₀² − (ω−ω₀)²).
//
// # Safety
// `out` must point to writable storage for one `NmModel*`. On `NM_STATUS_OK`
// the caller owns the handle and must release it with [`nm_model_free`].
enum NmStatus nm_model_waveguide_new(double eta, double omega0, double xi0, struct NmModel **out);

// Create an ohmic-family reservoir model with exponential cutoff.
//
// # Safety
// `out` must point to writable storage for one `NmModel*`. On `NM_STATUS_OK`
// the caller owns the handle and must release it with [`nm_model_free`].
enum NmStatus nm_model_ohmic_new(double kappa,
                                 double omega_cut,
                                 double exponent,
                                 struct NmModel **out);

// Release a model handle. A null pointer is a no-op.
//
// # Safety
// `model` must be a handle from a `nm_model_*_new` call that has not been
// freed already.
void nm_model_free(struct NmModel *model);

// Solve the Green function u(t) and noise integral v(t) for a mode of
// frequency `omega_c` coupled to the reservoir at temperature `theta`
// (θ = 0 is the vacuum), on a uniform grid of step `dt` out to `horizon`.
//
// # Safety
// `model` must be a live model handle; `out` must point to writable storage
// for one `NmSolution*`. On `NM_STATUS_OK` the caller owns the solution and
// must release it with [`nm_solution_free`].
enum NmStatus nm_solve_green(const struct NmModel *model,
                             double omega_c,
                             double theta,
                             double dt,
                             double horizon,
                             struct NmSolution **out);

// Number of samples in a solution; 0 for a null handle.
//
// # Safety
// `sol` must be null or a live solution handle.
size_t nm_solution_len(const struct NmSolution *sol);

// Grid step of a solution; 0 for a null handle.
//
// # Safety
// `sol` must be null or a live solution handle.
double nm_solution_dt(const struct NmSolution *sol);

// Read sample `k` of a solution: u(t_k) into (`u_re`, `u_im`) and v(t_k)
// into `v`. `NM_STATUS_DOMAIN` if `k` is out of range.
//
// # Safety
// `sol` must be a live solution handle; `u_re`, `u_im`, and `v` must each
// point to writable storage for one double.
enum NmStatus nm_solution_sample(const struct NmSolution *sol,
                                 size_t k,
                                 double *u_re,
                                 double *u_im,
                                 double *v);

// Release a solution handle. A null pointer is a no-op.
//
// # Safety
// `sol` must be a handle from [`nm_solve_green`] that has not been freed
// already.
void nm_solution_free(struct NmSolution *sol);

// Bound-pole analysis of the mode as a JSON report (band, bound poles with
// residues, critical coupling where defined, continuum weight, sum-rule
// residual).
//
// # Safety
// `model` must be a live model handle; `out` must point to writable storage
// for one `char*`. On `NM_STATUS_OK` the caller owns the string and must
// release it with [`nm_string_free`].
enum NmStatus nm_pole_report_json(const struct NmModel *model, double omega_c, char **out);

// Fringe visibility F = exp{-2|α|²(1 - |u|²/(1 + 2v))} of an evolved cat
// state with amplitude α at Green function u and noise v.
//
// # Safety
// `out` must point to writable storage for one double.
enum NmStatus nm_fringe_visibility(double alpha_re,
                                   double alpha_im,
                                   double u_re,
                                   double u_im,
                                   double v,
                                   double *out);

// Thermal-state Wigner function (2/π)(1 + 2n̄)⁻¹ e^{-2|z|²/(1+2n̄)} at
// z = z_re + i·z_im.
//
// # Safety
// `out` must point to writable storage for one double.
enum NmStatus nm_thermal_wigner(double z_re, double z_im, double nbar, double *out);

// Critical waveguide coupling η_c = √(2 - |ω_c - ω₀|/ξ₀) below which no
// bound poles exist. `NM_STATUS_DOMAIN` if the mode is outside the band.
//
// # Safety
// `out` must point to writable storage for one double.
enum NmStatus nm_critical_coupling(double omega_c, double omega0, double xi0, double *out);

// Release a string returned by this library. A null pointer is a no-op.
//
// # Safety
// `s` must be a string from this library that has not been freed already.
void nm_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NONMARKOV_H */
