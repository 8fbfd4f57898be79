#ifndef BILLIARDS_TOLERANCES_HPP
#define BILLIARDS_TOLERANCES_HPP

#include <cstdlib>
#include <cstring>

namespace billiards {

// Central tolerance profile, in table-diameter units ~1 unless noted.
struct Tolerances {
    double grazing = 1e-7;           // |<v,N>| below this rejects the bounce
    double hit_residual = 1e-12;     // ray/boundary intersection residual
    double t_min = 1e-9;             // forward-hit parameters below this are the departure point
    double degeneracy = 1e-9;        // |v'(u)| below this means focus at infinity
    double conjugacy = 1e-6;         // |f_m| below this means conjugate endpoints
    double certificate = 1e-8;       // max |angle_in - angle_out| for a billiard path
    double path_identity = 1e-6;     // vertex-tuple circle distance for path dedup
    double shooting_residual = 1e-10;
    int shooting_max_iters = 50;
    double newton_damping = 0.2;     // max Newton step before scaling
    double general_position = 1e-4;  // GP1-GP4 and NC separation
    double vertex_on_boundary = 1e-9;

    static Tolerances from_env();
};

inline Tolerances Tolerances::from_env() {
    Tolerances t;
    const char* profile = std::getenv("BILLIARDS_TOL_PROFILE");
    if (profile == nullptr || std::strcmp(profile, "default") == 0) return t;
    if (std::strcmp(profile, "strict") == 0) {
        t.general_position = 1e-3;
        t.conjugacy = 1e-7;
    } else if (std::strcmp(profile, "loose") == 0) {
        t.general_position = 1e-5;
        t.conjugacy = 1e-5;
    }
    return t;
}

}  // namespace billiards

#endif
