// Prints the exact completion flux of the three forgetful collectors next to
// their closed-form predictions, over a small parameter sweep. A quick way to
// see how fast the finite-n flux approaches the asymptotic scale.

#include <cstdio>

#include <couponflux/careless.hpp>
#include <couponflux/clumsy.hpp>
#include <couponflux/combined.hpp>

int main() {
    using namespace couponflux;

    std::printf("clumsy collector, exact flux vs p q^n\n");
    std::printf("%4s %6s %16s %16s %12s\n", "n", "p", "log flux", "log p q^n", "ratio");
    for (int n : {4, 8, 16, 24}) {
        for (double p : {0.3, 0.5, 0.7}) {
            FluxReport f = clumsy_flux(ClumsyParams(n, p));
            std::printf("%4d %6.2f %16.8f %16.8f %12.3e\n", n, p, f.log_exact,
                        f.log_predicted, f.log_ratio);
        }
    }

    std::printf("\ncareless collector, exact flux vs lucky-climb prediction\n");
    std::printf("%4s %6s %16s %16s %12s\n", "n", "q", "log flux", "log predicted", "log ratio");
    for (int n : {4, 8, 16, 24}) {
        for (double q : {0.3, 0.5, 0.7}) {
            FluxReport f = careless_flux(CarelessParams(n, q));
            std::printf("%4d %6.2f %16.6f %16.6f %12.5f\n", n, q, f.log_exact,
                        f.log_predicted, f.log_ratio);
        }
    }

    std::printf("\ncombined collector (alpha = 0.2, beta = 0.5)\n");
    std::printf("%4s %16s %16s %12s\n", "n", "log flux", "log predicted", "log ratio");
    for (int n : {4, 8, 16, 24, 40}) {
        FluxReport f = combined_flux(CombinedParams(n, 0.2, 0.5));
        std::printf("%4d %16.6f %16.6f %12.5f\n", n, f.log_exact, f.log_predicted, f.log_ratio);
    }
    return 0;
}
