// Prints c_R/C_H across gamma for a few (d, s) pairs.
#include <cstdio>

#include <isoboltz/constants.hpp>

int main() {
    using namespace isoboltz;
    for (int d : {2, 3, 4}) {
        for (double s : {0.25, 0.5, 0.75}) {
            ModelParams p{d, 0.0, s};
            std::printf("d=%d s=%.2f threshold=%.6f\n", d, s, p.threshold());
            for (double g = p.threshold() - 0.3; g < -2 * s - 0.05; g += 0.1) {
                p.gamma = g;
                if (g <= -d) continue;
                auto c = compute_constants(p);
                std::printf("  gamma=%+.4f  phi=%.6f  cR/CH=%.6f\n", g, phi(p), c.ratio);
            }
        }
    }
}
