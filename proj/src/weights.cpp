#include "kvstar/weights.hpp"

#include "kvstar/envelope.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include <omp.h>

namespace kvstar {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double arg_positive(Complex w)
{
    double a = std::arg(w);
    if (a < 0)
        a += two_pi;
    if (a >= two_pi)
        a -= two_pi;
    return a;
}

} // namespace

double propagator_angle(Complex z1, Complex z2)
{
    if (z1 == z2)
        throw CoincidentPoints("propagator_angle: coincident points");
    Complex num = z1 - z2;
    Complex den = std::conj(z1) - z2;
    if (den == Complex(0.0, 0.0))
        throw CoincidentPoints("propagator_angle: conjugate point coincides");
    double phi = arg_positive(num / den) / two_pi;
    return phi >= 1.0 ? 0.0 : phi;
}

std::array<double, 4> propagator_gradient(Complex z1, Complex z2)
{
    Complex w = z1 - z2;
    Complex u = std::conj(z1) - z2;
    double nw = std::norm(w), nu = std::norm(u);
    // d arg(v) = (Re v dIm v - Im v dRe v) / |v|^2
    double dx1 = (-w.imag() / nw) - (-u.imag() / nu);
    double dy1 = (w.real() / nw) - (-u.real() / nu);
    double dx2 = (w.imag() / nw) - (u.imag() / nu);
    double dy2 = (-w.real() / nw) - (-u.real() / nu);
    return {dx1 / two_pi, dy1 / two_pi, dx2 / two_pi, dy2 / two_pi};
}

std::array<double, 2> two_angle_chart(Complex z)
{
    return {std::arg(z) / std::numbers::pi, std::arg(z - 1.0) / std::numbers::pi};
}

Complex two_angle_chart_inverse(double a, double b)
{
    double alpha = std::numbers::pi * a, beta = std::numbers::pi * b;
    return std::polar(std::sin(beta) / std::sin(beta - alpha), alpha);
}

double two_angle_jacobian(Complex z)
{
    return std::numbers::pi * std::numbers::pi * std::norm(z) * std::norm(z - 1.0) / z.imag();
}

// ---------------------------------------------------------------------------

namespace {

struct ChunkStats
{
    double sum = 0;
    double sum_sq = 0;
};

double uniform_open(std::mt19937_64& rng)
{
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

std::mt19937_64 chunk_rng(std::uint64_t seed, std::uint64_t chunk)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
    return std::mt19937_64(seq);
}

// In-place LU with partial pivoting; size at most 16.
double determinant(std::array<double, 256>& m, std::size_t n)
{
    double det = 1.0;
    for (std::size_t c = 0; c < n; ++c)
    {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(m[r * n + c]) > std::abs(m[p * n + c]))
                p = r;
        if (m[p * n + c] == 0.0)
            return 0.0;
        if (p != c)
        {
            for (std::size_t k = 0; k < n; ++k)
                std::swap(m[p * n + k], m[c * n + k]);
            det = -det;
        }
        double pivot = m[c * n + c];
        det *= pivot;
        for (std::size_t r = c + 1; r < n; ++r)
        {
            double f = m[r * n + c] / pivot;
            if (f == 0.0)
                continue;
            for (std::size_t k = c + 1; k < n; ++k)
                m[r * n + k] -= f * m[c * n + k];
        }
    }
    return det;
}

struct Edge
{
    std::size_t source;
    std::size_t target; // aerial id, or npos for a fixed point
    Complex fixed;
};

constexpr std::size_t fixed_point = static_cast<std::size_t>(-1);

enum class Chart
{
    two_angle,
    cayley_polar,
};

// Pulled-back density of prod_e d phi_e over the aerial points, times the chart Jacobian.
class FormIntegrand
{
  public:
    FormIntegrand(std::size_t points, std::vector<Edge> edges, Chart chart, bool absolute)
        : points_(points), edges_(std::move(edges)), chart_(chart), absolute_(absolute)
    {
        if (edges_.size() != 2 * points_ || points_ > 8)
            throw DegenerateForm("form degree does not match the configuration dimension");
    }

    double operator()(std::mt19937_64& rng) const
    {
        std::array<Complex, 8> z{};
        double measure = 1.0;
        for (std::size_t v = 0; v < points_; ++v)
        {
            double u1 = uniform_open(rng), u2 = uniform_open(rng);
            if (chart_ == Chart::two_angle)
            {
                double a = std::min(u1, u2), b = std::max(u1, u2);
                if (b - a <= 0.0)
                    return 0.0;
                z[v] = two_angle_chart_inverse(a, b);
                measure *= 0.5 * two_angle_jacobian(z[v]);
            }
            else
            {
                Complex w = std::polar(u1, two_pi * u2);
                z[v] = Complex(0.0, 1.0) * (1.0 + w) / (1.0 - w);
                measure *= 4.0 / std::pow(std::norm(1.0 - w), 2) * two_pi * u1;
            }
        }
        std::size_t n = 2 * points_;
        std::array<double, 256> m{};
        for (std::size_t r = 0; r < edges_.size(); ++r)
        {
            auto const& e = edges_[r];
            Complex target = e.target == fixed_point ? e.fixed : z[e.target];
            auto grad = propagator_gradient(z[e.source], target);
            m[r * n + 2 * e.source] = grad[0];
            m[r * n + 2 * e.source + 1] = grad[1];
            if (e.target != fixed_point)
            {
                m[r * n + 2 * e.target] = grad[2];
                m[r * n + 2 * e.target + 1] = grad[3];
            }
        }
        double value = determinant(m, n) * measure;
        return absolute_ ? std::abs(value) : value;
    }

  private:
    std::size_t points_;
    std::vector<Edge> edges_;
    Chart chart_;
    bool absolute_;
};

ChunkStats run_chunk(FormIntegrand const& f, std::uint64_t seed, std::uint64_t chunk, std::uint64_t count)
{
    auto rng = chunk_rng(seed, chunk);
    ChunkStats s;
    for (std::uint64_t i = 0; i < count; ++i)
    {
        double v = f(rng);
        s.sum += v;
        s.sum_sq += v * v;
    }
    return s;
}

ChunkStats pairwise_reduce(std::vector<ChunkStats> const& chunks, std::size_t lo, std::size_t hi)
{
    if (hi - lo == 1)
        return chunks[lo];
    std::size_t mid = lo + (hi - lo) / 2;
    auto a = pairwise_reduce(chunks, lo, mid);
    auto b = pairwise_reduce(chunks, mid, hi);
    return {a.sum + b.sum, a.sum_sq + b.sum_sq};
}

std::uint64_t chunk_length(std::uint64_t samples, std::uint64_t c)
{
    std::uint64_t start = c * mc_chunk_size;
    return std::min(mc_chunk_size, samples - start);
}

WeightEstimate finish(std::vector<ChunkStats> const& chunks, McOptions const& options,
                      std::chrono::steady_clock::time_point start)
{
    auto total = pairwise_reduce(chunks, 0, chunks.size());
    double n = static_cast<double>(options.samples);
    WeightEstimate w;
    w.mean = total.sum / n;
    double var = (total.sum_sq - total.sum * total.sum / n) / (n - 1.0);
    w.std_error = std::sqrt(std::max(var, 0.0) / n);
    w.samples = options.samples;
    w.seed = options.seed;
    w.workers = options.workers;
    w.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return w;
}

void check_options(McOptions const& options)
{
    if (options.samples < 2)
        throw Error("Monte-Carlo needs at least 2 samples");
    if (options.workers == 0)
        throw Error("workers must be positive");
}

WeightEstimate integrate_serial(FormIntegrand const& f, McOptions const& options)
{
    check_options(options);
    auto start = std::chrono::steady_clock::now();
    std::uint64_t count = (options.samples + mc_chunk_size - 1) / mc_chunk_size;
    std::vector<ChunkStats> chunks(count);
    for (std::uint64_t c = 0; c < count; ++c)
        chunks[c] = run_chunk(f, options.seed, c, chunk_length(options.samples, c));
    return finish(chunks, options, start);
}

WeightEstimate integrate_parallel(FormIntegrand const& f, McOptions const& options)
{
    check_options(options);
    auto start = std::chrono::steady_clock::now();
    std::uint64_t count = (options.samples + mc_chunk_size - 1) / mc_chunk_size;
    std::vector<ChunkStats> chunks(count);
    auto total = static_cast<std::int64_t>(count);
#pragma omp parallel for num_threads(options.workers) schedule(dynamic)
    for (std::int64_t c = 0; c < total; ++c)
    {
        auto uc = static_cast<std::uint64_t>(c);
        chunks[uc] = run_chunk(f, options.seed, uc, chunk_length(options.samples, uc));
    }
    return finish(chunks, options, start);
}

FormIntegrand graph_integrand(AdmissibleGraph const& graph)
{
    if (graph.m != 2)
        throw DegenerateForm("weights are defined for two ground vertices");
    validate(graph);
    if (graph.edge_count() != 2 * graph.n)
        throw DegenerateForm("graph has " + std::to_string(graph.edge_count()) + " edges, needs " +
                             std::to_string(2 * graph.n));
    if (graph.n > 8)
        throw DegenerateForm("too many aerial vertices");
    std::vector<Edge> edges;
    for (std::size_t v = 0; v < graph.n; ++v)
        for (auto t : graph.edges[v])
        {
            if (graph.is_ground(t))
                edges.push_back({v, fixed_point, Complex(static_cast<double>(t - graph.n), 0.0)});
            else
                edges.push_back({v, t, {}});
        }
    return FormIntegrand(graph.n, std::move(edges), Chart::two_angle, false);
}

WeightEstimate empty_graph_weight(AdmissibleGraph const& graph, McOptions const& options)
{
    WeightEstimate w;
    w.mean = 1.0;
    w.samples = options.samples;
    w.seed = options.seed;
    w.workers = options.workers;
    w.graph = to_string(graph);
    return w;
}

} // namespace

WeightEstimate mc_weight(AdmissibleGraph const& graph, McOptions const& options)
{
    if (graph.n == 0 && graph.m == 2 && graph.edge_count() == 0)
        return empty_graph_weight(graph, options);
    auto w = integrate_parallel(graph_integrand(graph), options);
    w.graph = to_string(graph);
    return w;
}

WeightEstimate mc_weight_serial(AdmissibleGraph const& graph, McOptions const& options)
{
    if (graph.n == 0 && graph.m == 2 && graph.edge_count() == 0)
        return empty_graph_weight(graph, options);
    auto w = integrate_serial(graph_integrand(graph), options);
    w.graph = to_string(graph);
    return w;
}

WeightEstimate wheel_weight_check(unsigned k, McOptions const& options, WheelIntegrand integrand)
{
    if (k < 2 || k > 8)
        throw Error("wheel_weight_check: k must be in 2..8");
    std::vector<Edge> edges;
    for (std::size_t j = 0; j < k; ++j)
    {
        edges.push_back({j, (j + 1) % k, {}});
        edges.push_back({j, fixed_point, Complex(0.0, 1.0)});
    }
    FormIntegrand f(k, std::move(edges), Chart::cayley_polar, integrand == WheelIntegrand::absolute_density);
    auto w = integrate_parallel(f, options);
    w.graph = "wheel " + std::to_string(k) + (integrand == WheelIntegrand::absolute_density ? " |density|" : "");
    return w;
}

// ---------------------------------------------------------------------------

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag)
{
    // FNV-1a of the tag, then a splitmix64 finalizer
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : tag)
    {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::uint64_t x = seed ^ h;
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

WeightEstimate const& WeightTable::get(AdmissibleGraph const& canonical)
{
    if (auto it = entries_.find(canonical); it != entries_.end())
        return it->second;
    McOptions o = options_;
    o.seed = derive_seed(options_.seed, to_string(canonical));
    return entries_.emplace(canonical, mc_weight(canonical, o)).first->second;
}

GraphStarResult graph_star(LieAlgebra const& g, Polynomial const& f1, Polynomial const& f2, int order,
                           WeightTable& weights)
{
    if (order < 0 || order > 3)
        throw Error("graph_star: order must be in 0..3");
    std::size_t d = g.dim();
    GraphStarResult result;
    result.nvars = d;
    Rational scale = 1;
    for (int n = 0; n <= order; ++n)
    {
        if (n > 0)
            scale /= Rational(2 * n);
        EnumerationOptions opts;
        opts.out_degree = 2;
        opts.max_in_degree_aerial = 1;
        std::map<AdmissibleGraph, std::pair<std::size_t, Polynomial>> classes;
        for (auto const& graph : enumerate_graphs(static_cast<std::size_t>(n), 2, opts))
        {
            auto b = bidiff_apply(g, graph, f1, f2);
            if (b.is_zero())
                continue;
            auto& entry = classes.try_emplace(canonical_form(graph), 0, Polynomial(d)).first->second;
            ++entry.first;
            entry.second += b;
        }
        for (auto& [canonical, entry] : classes)
        {
            if (entry.second.is_zero())
                continue;
            auto const& w = weights.get(canonical);
            double factor = scale.get_d();
            for (auto const& [e, c] : entry.second.terms())
            {
                double coeff = factor * c.get_d();
                auto& slot = result.terms[e];
                slot.value += coeff * w.mean;
                slot.std_error = std::hypot(slot.std_error, coeff * w.std_error);
            }
            result.graphs.push_back({canonical, entry.first, w, entry.second});
        }
    }
    return result;
}

Polynomial star_up_to_order(LieAlgebra const& g, Polynomial const& f1, Polynomial const& f2, int order)
{
    Envelope env(g);
    Polynomial result(g.dim());
    for (int p = 0; p <= std::max(f1.degree(), 0); ++p)
    {
        auto a = f1.homogeneous_part(p);
        if (a.is_zero())
            continue;
        for (int q = 0; q <= std::max(f2.degree(), 0); ++q)
        {
            auto b = f2.homogeneous_part(q);
            if (b.is_zero())
                continue;
            auto product = env.star(a, b);
            for (int n = 0; n <= order && n <= p + q; ++n)
                result += product.homogeneous_part(p + q - n);
        }
    }
    return result;
}

} // namespace kvstar
