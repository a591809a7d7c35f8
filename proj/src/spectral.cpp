#include "sigmalab/spectral.hpp"

#include "sigmalab/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace sigmalab {

namespace {

// FFTW planning is not thread safe; execution on new arrays is. Plans live for the process.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache c;
        return c;
    }

    fftw_plan get(int n, int N, bool forward) {
        std::lock_guard lock(mu_);
        const auto key = std::make_tuple(n, N, forward);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        const size_t real_n = n == 1 ? size_t(N) : size_t(N) * N;
        const size_t cplx_n = n == 1 ? size_t(N / 2 + 1) : size_t(N) * (N / 2 + 1);
        double* r = fftw_alloc_real(real_n);
        fftw_complex* c = fftw_alloc_complex(cplx_n);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fftw_plan p = nullptr;
        if (n == 1) p = forward ? fftw_plan_dft_r2c_1d(N, r, c, flags) : fftw_plan_dft_c2r_1d(N, c, r, flags);
        else p = forward ? fftw_plan_dft_r2c_2d(N, N, r, c, flags) : fftw_plan_dft_c2r_2d(N, N, c, r, flags);
        fftw_free(r);
        fftw_free(c);
        if (!p) throw Error(ErrorCode::GridMismatch, "FFTW could not build a plan");
        plans_.emplace(key, p);
        return p;
    }

private:
    std::mutex mu_;
    std::map<std::tuple<int, int, bool>, fftw_plan> plans_;
};

} // namespace

Grid::Grid(int n_, int N_, double L_) : n(n_), N(N_), L(L_) {
    if (n != 1 && n != 2) throw Error(ErrorCode::GridMismatch, "grid dimension must be 1 or 2");
    if (N < 4 || (N & (N - 1)) != 0) throw Error(ErrorCode::GridMismatch, "N must be a power of two >= 4");
    if (!(L > 0.0)) throw Error(ErrorCode::GridMismatch, "box half-length must be > 0");
}

double Grid::xi_norm(size_t k) const noexcept {
    const double unit = M_PI / L;
    if (n == 1) return unit * static_cast<double>(k);
    const size_t half = size_t(N / 2 + 1);
    const long row = static_cast<long>(k / half);
    const long col = static_cast<long>(k % half);
    const long kr = row < N / 2 ? row : row - N;
    return unit * std::hypot(static_cast<double>(kr), static_cast<double>(col));
}

int Grid::max_wavenumber(size_t k) const noexcept {
    if (n == 1) return static_cast<int>(k);
    const size_t half = size_t(N / 2 + 1);
    const long row = static_cast<long>(k / half);
    const long col = static_cast<long>(k % half);
    const long kr = row < N / 2 ? row : row - N;
    return static_cast<int>(std::max(std::labs(kr), col));
}

SpectralField::SpectralField(const Grid& g) : grid_(g), values_(g.size(), 0.0), coeffs_() {}

SpectralField SpectralField::from_function(const Grid& g, const std::function<double(double)>& f) {
    if (g.n != 1) throw Error(ErrorCode::GridMismatch, "1D initializer on a 2D grid");
    SpectralField s(g);
    for (int i = 0; i < g.N; ++i) s.values_[i] = f(g.x(i));
    return s;
}

SpectralField SpectralField::from_function(const Grid& g, const std::function<double(double, double)>& f) {
    if (g.n != 2) throw Error(ErrorCode::GridMismatch, "2D initializer on a 1D grid");
    SpectralField s(g);
    for (int i = 0; i < g.N; ++i)
        for (int j = 0; j < g.N; ++j) s.values_[size_t(i) * g.N + j] = f(g.x(i), g.x(j));
    return s;
}

void SpectralField::sync_values() const {
    if (values_ok_) return;
    std::vector<cplx> tmp = coeffs_; // c2r destroys its input
    values_.resize(grid_.size());
    fftw_execute_dft_c2r(PlanCache::instance().get(grid_.n, grid_.N, false),
                         reinterpret_cast<fftw_complex*>(tmp.data()), values_.data());
    const double scale = 1.0 / static_cast<double>(grid_.size());
    for (auto& v : values_) v *= scale;
    values_ok_ = true;
}

void SpectralField::sync_coeffs() const {
    if (coeffs_ok_) return;
    coeffs_.resize(grid_.spectral_size());
    std::vector<double> tmp = values_;
    fftw_execute_dft_r2c(PlanCache::instance().get(grid_.n, grid_.N, true), tmp.data(),
                         reinterpret_cast<fftw_complex*>(coeffs_.data()));
    coeffs_ok_ = true;
}

const std::vector<double>& SpectralField::values() const {
    sync_values();
    return values_;
}

const std::vector<SpectralField::cplx>& SpectralField::coeffs() const {
    sync_coeffs();
    return coeffs_;
}

std::vector<double>& SpectralField::values_mut() {
    sync_values();
    coeffs_ok_ = false;
    return values_;
}

std::vector<SpectralField::cplx>& SpectralField::coeffs_mut() {
    sync_coeffs();
    values_ok_ = false;
    return coeffs_;
}

void SpectralField::apply_multiplier(const std::function<double(double)>& m) {
    auto& c = coeffs_mut();
    for (size_t k = 0; k < c.size(); ++k) c[k] *= m(grid_.xi_norm(k));
}

void SpectralField::dealias(double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw Error(ErrorCode::GridMismatch, "dealias fraction in (0,1]");
    if (fraction == 1.0) return;
    const double cut = fraction * grid_.N / 2.0;
    auto& c = coeffs_mut();
    for (size_t k = 0; k < c.size(); ++k)
        if (grid_.max_wavenumber(k) > cut) c[k] = 0.0;
}

double SpectralField::sup_norm() const {
    double m = 0.0;
    for (double v : values()) m = std::max(m, std::abs(v));
    return m;
}

double SpectralField::lp_norm(double p) const {
    if (std::isinf(p)) return sup_norm();
    double acc = 0.0;
    for (double v : values()) acc += std::pow(std::abs(v), p);
    return std::pow(acc * grid_.cell_volume(), 1.0 / p);
}

double SpectralField::integral() const {
    double acc = 0.0;
    for (double v : values()) acc += v;
    return acc * grid_.cell_volume();
}

SpectralField spectral_fraclap(const SpectralField& f, double s) {
    if (!(s >= 0.0)) throw Error(ErrorCode::InvalidOrder, "fractional order must be >= 0");
    SpectralField out = f;
    if (s == 0.0) return out;
    out.apply_multiplier([s](double xi) { return xi == 0.0 ? 0.0 : std::pow(xi, 2.0 * s); });
    return out;
}

double inner_product(const SpectralField& f, const SpectralField& g) {
    if (!(f.grid() == g.grid())) throw Error(ErrorCode::GridMismatch, "inner product of fields on different grids");
    const auto& a = f.values();
    const auto& b = g.values();
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc * f.grid().cell_volume();
}

} // namespace sigmalab
