#ifndef FRACBEM_H
#define FRACBEM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum FracbemStatus {
  FRACBEM_STATUS_OK = 0,
  FRACBEM_STATUS_NULL_POINTER = 1,
  FRACBEM_STATUS_CONFIG = 2,
  FRACBEM_STATUS_DOMAIN = 3,
  FRACBEM_STATUS_SINGULARITY = 4,
  FRACBEM_STATUS_DATA = 5,
  FRACBEM_STATUS_ASSEMBLY = 6,
  FRACBEM_STATUS_SOLVER = 7,
  FRACBEM_STATUS_EVALUATION = 8,
  FRACBEM_STATUS_ORACLE = 9,
  FRACBEM_STATUS_IO = 10,
  FRACBEM_STATUS_BUFFER_TOO_SMALL = 11,
  FRACBEM_STATUS_PANIC = 12,
} FracbemStatus;

// Piecewise-constant boundary density together with its order.
typedef struct FracbemDensity FracbemDensity;

// Assembled Galerkin single-layer matrix.
typedef struct FracbemMatrix FracbemMatrix;

// Boundary curve discretized into straight panels.
typedef struct FracbemMesh FracbemMesh;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL if none.
//
// The pointer stays valid until the next failing call on the same thread.
const char *fracbem_last_error(void);

// Riesz kernel constant `C(d, α)` for `α ∈ (0, 1)`, `d ∈ {2, 3}`.
//
// # Safety
// `out` must be valid for one write.
enum FracbemStatus fracbem_riesz_constant(size_t dim, double alpha, double *out);

// Circle of radius `radius` about `(cx, cy)` split into `n_panels` chords.
//
// # Safety
// `out` must be valid for one write.
enum FracbemStatus fracbem_mesh_circle(double cx,
                                       double cy,
                                       double radius,
                                       size_t n_panels,
                                       struct FracbemMesh **out);

// Polygon through `n_vertices` points `xy = [x0, y0, x1, y1, ...]`.
//
// # Safety
// `xy` must point to `2 * n_vertices` doubles and `out` must be valid for one write.
enum FracbemStatus fracbem_mesh_polygon(const double *xy,
                                        size_t n_vertices,
                                        size_t n_panels,
                                        struct FracbemMesh **out);

// Number of panels, or 0 for a null handle.
//
// # Safety
// `mesh` must be null or a live handle.
size_t fracbem_mesh_len(const struct FracbemMesh *mesh);

// Copies panel midpoints as `[x0, y0, x1, y1, ...]` into `out` of length `2 * len`.
//
// # Safety
// `mesh` must be a live handle and `out` must hold `2 * len` doubles.
enum FracbemStatus fracbem_mesh_midpoints(const struct FracbemMesh *mesh, double *out, size_t len);

// # Safety
// `mesh` must be null or a handle not yet freed.
void fracbem_mesh_free(struct FracbemMesh *mesh);

// Assembles the Galerkin matrix of order `alpha` in 2D with `quad_order` Gauss points.
//
// # Safety
// `mesh` must be a live handle and `out` must be valid for one write.
enum FracbemStatus fracbem_assemble(const struct FracbemMesh *mesh,
                                    double alpha,
                                    size_t quad_order,
                                    struct FracbemMatrix **out);

// Matrix dimension, or 0 for a null handle.
//
// # Safety
// `matrix` must be null or a live handle.
size_t fracbem_matrix_size(const struct FracbemMatrix *matrix);

// Copies the entries row-major into `out` of length `len ≥ n²`.
//
// # Safety
// `matrix` must be a live handle and `out` must hold `len` doubles.
enum FracbemStatus fracbem_matrix_entries(const struct FracbemMatrix *matrix,
                                          double *out,
                                          size_t len);

// Writes 1 if Cholesky factorization succeeds, else 0.
//
// # Safety
// `matrix` must be a live handle and `out` valid for one write.
enum FracbemStatus fracbem_matrix_is_spd(const struct FracbemMatrix *matrix, int32_t *out);

// # Safety
// `matrix` must be null or a handle not yet freed.
void fracbem_matrix_free(struct FracbemMatrix *matrix);

// Solves for the density whose panel-averaged trace is `trace[0..n]`.
//
// # Safety
// `matrix` must be a live handle, `trace` must hold `n` doubles and `out`
// must be valid for one write.
enum FracbemStatus fracbem_solve(const struct FracbemMatrix *matrix,
                                 const double *trace,
                                 size_t n,
                                 struct FracbemDensity **out);

// Copies the panel values of the density into `out` of length `len`.
//
// # Safety
// `density` must be a live handle and `out` must hold `len` doubles.
enum FracbemStatus fracbem_density_coeffs(const struct FracbemDensity *density,
                                          double *out,
                                          size_t len);

// `‖G‖_{L₁}` of the density.
//
// # Safety
// `density` must be a live handle and `out` valid for one write.
enum FracbemStatus fracbem_density_l1_norm(const struct FracbemDensity *density, double *out);

// Evaluates `S_α G` at `n_points` points `xy = [x0, y0, ...]` off the boundary.
//
// # Safety
// `density` must be a live handle, `xy` must hold `2 * n_points` doubles and
// `out` must hold `n_points` doubles.
enum FracbemStatus fracbem_density_eval(const struct FracbemDensity *density,
                                        const double *xy,
                                        size_t n_points,
                                        double *out);

// # Safety
// `density` must be null or a handle not yet freed.
void fracbem_density_free(struct FracbemDensity *density);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRACBEM_H */
