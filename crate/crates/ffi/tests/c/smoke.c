#include <math.h>
#include <stdio.h>
#include "fekete_sphere.h"

#define CHECK(call)                                                        \
    do {                                                                   \
        FsStatus s_ = (call);                                              \
        if (s_ != FS_STATUS_OK) {                                          \
            fprintf(stderr, "%s -> %d: %s\n", #call, (int)s_, fs_last_error()); \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    size_t dim = 0;
    CHECK(fs_space_dimension(2, 3, &dim));
    if (dim != 16) return 2;

    FsPointSet *set = NULL;
    CHECK(fs_fekete_points(2, 1, 0, &set));
    double logdet = 0.0;
    CHECK(fs_logabsdet(set, 1, &logdet));
    double sep = 0.0;
    CHECK(fs_separation(set, &sep));

    FsCardinalBasis *basis = NULL;
    CHECK(fs_cardinal_basis_new(set, 1, &basis));
    double coords[12];
    CHECK(fs_point_set_coords(set, coords, 12));
    double values[4];
    CHECK(fs_cardinal_eval(basis, coords + 3, values, 4));

    if (fs_logabsdet(NULL, 1, &logdet) != FS_STATUS_NULL_POINTER) return 3;
    if (fs_last_error() == NULL) return 4;

    printf("%zu %.6f %.6f %.6f %.6f\n", dim, logdet, sep, values[1], fs_molnar_kappa());
    fs_cardinal_basis_free(basis);
    fs_point_set_free(set);
    return 0;
}
