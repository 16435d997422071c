#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#include "fracbem.h"

#define N 32

int main(void) {
    FracbemMesh *mesh = NULL;
    FracbemMatrix *a = NULL;
    FracbemDensity *g = NULL;
    double trace[N], coeffs[N], x[4] = {0.0, 0.0, 3.0, 0.0}, u[2];
    int spd = 0;

    if (fracbem_mesh_circle(0.0, 0.0, 1.0, N, &mesh) != FRACBEM_STATUS_OK) return 1;
    if (fracbem_assemble(mesh, 0.75, 10, &a) != FRACBEM_STATUS_OK) return 2;
    if (fracbem_matrix_is_spd(a, &spd) != FRACBEM_STATUS_OK || !spd) return 3;
    for (int i = 0; i < N; i++) trace[i] = 1.0;
    if (fracbem_solve(a, trace, N, &g) != FRACBEM_STATUS_OK) return 4;
    if (fracbem_density_coeffs(g, coeffs, N) != FRACBEM_STATUS_OK) return 5;
    for (int i = 1; i < N; i++)
        if (fabs(coeffs[i] - coeffs[0]) > 1e-8 * coeffs[0]) return 6;
    if (fracbem_density_eval(g, x, 2, u) != FRACBEM_STATUS_OK || !(u[0] > u[1])) return 7;
    if (fracbem_assemble(mesh, 0.9, 10, &a) != FRACBEM_STATUS_CONFIG) return 8;
    if (fracbem_last_error() == NULL) return 9;

    printf("%.17g %.17g\n", coeffs[0], u[0]);
    fracbem_density_free(g);
    fracbem_matrix_free(a);
    fracbem_mesh_free(mesh);
    return 0;
}
