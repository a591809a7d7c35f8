#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace sigmalab {

/// Periodic box [-L, L)^n with N points per axis, n in {1, 2}.
struct Grid {
    int n = 1;
    int N = 256;
    double L = 10.0;

    Grid() = default;
    Grid(int n_, int N_, double L_);

    [[nodiscard]] size_t size() const noexcept { return n == 1 ? size_t(N) : size_t(N) * N; }
    /// Number of complex coefficients in the half-spectrum (r2c) layout.
    [[nodiscard]] size_t spectral_size() const noexcept {
        return n == 1 ? size_t(N / 2 + 1) : size_t(N) * (N / 2 + 1);
    }
    [[nodiscard]] double dx() const noexcept { return 2.0 * L / N; }
    [[nodiscard]] double cell_volume() const noexcept { return n == 1 ? dx() : dx() * dx(); }
    [[nodiscard]] double x(int i) const noexcept { return -L + i * dx(); }
    /// |ξ| for half-spectrum index k; ξ = πk/L per axis.
    [[nodiscard]] double xi_norm(size_t k) const noexcept;
    /// Largest integer wavenumber magnitude along any axis for index k.
    [[nodiscard]] int max_wavenumber(size_t k) const noexcept;

    bool operator==(const Grid& o) const noexcept { return n == o.n && N == o.N && L == o.L; }
};

/// Real field on a Grid, holding physical values and half-spectrum coefficients.
/// Only one representation is authoritative at a time; the other is rebuilt lazily.
/// Coefficients are unnormalized forward DFT output.
class SpectralField {
public:
    using cplx = std::complex<double>;

    explicit SpectralField(const Grid& g);
    static SpectralField from_function(const Grid& g, const std::function<double(double)>& f);
    static SpectralField from_function(const Grid& g, const std::function<double(double, double)>& f);

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }

    [[nodiscard]] const std::vector<double>& values() const;
    [[nodiscard]] const std::vector<cplx>& coeffs() const;
    /// Mutable access invalidates the other representation.
    std::vector<double>& values_mut();
    std::vector<cplx>& coeffs_mut();

    [[nodiscard]] bool values_current() const noexcept { return values_ok_; }
    [[nodiscard]] bool coeffs_current() const noexcept { return coeffs_ok_; }

    /// Multiply coefficient k by m(|ξ_k|).
    void apply_multiplier(const std::function<double(double)>& m);
    /// Zero all modes with a wavenumber above fraction·N/2 along some axis.
    void dealias(double fraction);

    [[nodiscard]] double sup_norm() const;
    [[nodiscard]] double lp_norm(double p) const;
    [[nodiscard]] double integral() const;

private:
    void sync_values() const;
    void sync_coeffs() const;

    Grid grid_;
    mutable std::vector<double> values_;
    mutable std::vector<cplx> coeffs_;
    mutable bool values_ok_ = true;
    mutable bool coeffs_ok_ = false;
};

/// (-Δ)^s as the multiplier |ξ|^{2s}; the zero mode is annihilated for s > 0.
SpectralField spectral_fraclap(const SpectralField& f, double s);

/// Discrete L2 inner product Σ f g dV.
double inner_product(const SpectralField& f, const SpectralField& g);

} // namespace sigmalab
