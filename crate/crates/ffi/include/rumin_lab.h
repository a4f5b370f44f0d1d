#ifndef RUMIN_LAB_H
#define RUMIN_LAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RlStatus {
  RL_STATUS_OK = 0,
  RL_STATUS_NULL_POINTER = 1,
  RL_STATUS_INVALID_ARGUMENT = 2,
  RL_STATUS_NUMERIC = 3,
  RL_STATUS_BUFFER_TOO_SMALL = 4,
  RL_STATUS_UTF8 = 5,
  RL_STATUS_PANIC = 6,
} RlStatus;

// Algebra, metric and representation.
typedef struct RlContext RlContext;

// A computed spectrum with its truncation diagnostics.
typedef struct RlSpectrum RlSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to `len`). Returns the full message length without the NUL.
//
// # Safety
// `buf` is null or points to `len` writable bytes.
uintptr_t rl_last_error(char *buf, uintptr_t len);

// Static version string.
const char *rl_version(void);

// Builds a context. `algebra` is "235", "heisenberg" or "abelian:n";
// `rep` is "scalar:α₁,…", "schroedinger:ħ" or "generic:λ,μ,ν"; the metric
// parameters are rationals such as "3/2" and default to "1" when null.
//
// # Safety
// String arguments are null or NUL-terminated; `out` is writable.
enum RlStatus rl_context_new(const char *algebra,
                             const char *rep,
                             const char *a,
                             const char *b11,
                             const char *b22,
                             struct RlContext **out);

// # Safety
// `ctx` is null or came from [`rl_context_new`] and was not freed.
void rl_context_free(struct RlContext *ctx);

// Number of differentials D_0 … D_{n−1}; 0 for a null handle.
//
// # Safety
// `ctx` is null or a live context.
uintptr_t rl_context_degree_count(const struct RlContext *ctx);

// Exact check of D_{q+1}D_q = 0; `passed` receives 1 or 0.
//
// # Safety
// `ctx` is a live context, `passed` is writable.
enum RlStatus rl_context_verify(const struct RlContext *ctx, int32_t *passed);

// Closed-form log det|D_q| for every q into `log_dets` (at least
// [`rl_context_degree_count`] entries) and log τ into `log_torsion`.
//
// # Safety
// `ctx` is a live context; `log_dets` has `len` writable entries;
// `log_torsion` is writable.
enum RlStatus rl_closed_form(const struct RlContext *ctx,
                             double *log_dets,
                             uintptr_t len,
                             double *log_torsion);

// Numeric log det|D_q| and log τ from truncated spectra with `n` modes;
// `guard` 0 selects the recommended guard band.
//
// # Safety
// As for [`rl_closed_form`].
enum RlStatus rl_numeric_torsion(const struct RlContext *ctx,
                                 uintptr_t n,
                                 uintptr_t guard,
                                 double *log_dets,
                                 uintptr_t len,
                                 double *log_torsion);

// Spectrum of D_q^{*h}D_q, or of the Rumin–Seshadri Laplacian
// Δ_{h,q} when `laplacian` is nonzero, with `n` modes.
//
// # Safety
// `ctx` is a live context; `out` is writable.
enum RlStatus rl_spectrum_new(const struct RlContext *ctx,
                              uintptr_t q,
                              uintptr_t n,
                              uintptr_t guard,
                              int32_t laplacian,
                              struct RlSpectrum **out);

// # Safety
// `s` is null or came from [`rl_spectrum_new`] and was not freed.
void rl_spectrum_free(struct RlSpectrum *s);

// # Safety
// `s` is null or a live spectrum.
uintptr_t rl_spectrum_len(const struct RlSpectrum *s);

// Number of leading eigenvalues classified as kernel.
//
// # Safety
// `s` is null or a live spectrum.
uintptr_t rl_spectrum_kernel_count(const struct RlSpectrum *s);

// Number of leading eigenvalues inside the trust window.
//
// # Safety
// `s` is null or a live spectrum.
uintptr_t rl_spectrum_trust_count(const struct RlSpectrum *s);

// Kernel threshold that was applied.
//
// # Safety
// `s` is null or a live spectrum.
double rl_spectrum_kernel_threshold(const struct RlSpectrum *s);

// Copies the ascending eigenvalues into `buf`.
//
// # Safety
// `s` is a live spectrum; `buf` has `len` writable entries.
enum RlStatus rl_spectrum_copy(const struct RlSpectrum *s, double *buf, uintptr_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RUMIN_LAB_H */
