#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "stlfalsify/constraints/constraints.hpp"
#include "stlfalsify/samplers/gaussian_process.hpp"
#include "stlfalsify/samplers/truncated_normal.hpp"
#include "stlfalsify/stl/trace.hpp"

namespace stlf {

struct CategoricalModel {
    std::vector<double> probabilities;
};
struct UniformModel {
    double lo = 0.0;
    double hi = 1.0;
};
struct NormalModel {
    double mean = 0.0;
    double variance = 1.0;
};
struct GaussianProcessModel {
    double mean = 0.0;  // constant mean function
    double variance = 1.0;
    double length = 1.0;  // seconds
};

using ChannelModel = std::variant<CategoricalModel, UniformModel, NormalModel, GaussianProcessModel>;

struct DisturbanceModel {
    ChannelList channels;
    std::vector<ChannelModel> models;  // parallel to channels

    void validate() const {
        if (channels.size() != models.size()) throw std::invalid_argument("model: one channel model per channel");
        for (std::size_t j = 0; j < channels.size(); ++j) {
            const auto& spec = channels[j];
            spec.validate();
            const auto& mdl = models[j];
            if (auto c = std::get_if<CategoricalModel>(&mdl)) {
                if (!spec.is_categorical() || c->probabilities.size() != spec.symbol_count())
                    throw std::invalid_argument("model: categorical model does not match channel " + spec.id);
                double sum = 0.0;
                for (double p : c->probabilities) {
                    if (!(p >= 0)) throw std::invalid_argument("model: negative probability on " + spec.id);
                    sum += p;
                }
                if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("model: probabilities of " + spec.id + " do not sum to 1");
                continue;
            }
            if (spec.is_categorical()) throw std::invalid_argument("model: continuous model on categorical channel " + spec.id);
            if (auto u = std::get_if<UniformModel>(&mdl); u && !(u->lo < u->hi))
                throw std::invalid_argument("model: uniform lo >= hi on " + spec.id);
            if (auto n = std::get_if<NormalModel>(&mdl); n && !(n->variance > 0))
                throw std::invalid_argument("model: normal variance must be positive on " + spec.id);
            if (auto g = std::get_if<GaussianProcessModel>(&mdl); g && !(g->variance > 0 && g->length > 0))
                throw std::invalid_argument("model: GP variance and length must be positive on " + spec.id);
        }
    }

    /// Every channel categorical: trace probabilities are proper probabilities.
    bool discrete() const {
        for (const auto& m : models)
            if (!std::holds_alternative<CategoricalModel>(m)) return false;
        return true;
    }
};

namespace detail {

template <class URBG>
void sample_categorical(const CategoricalModel& mdl, const SymbolMask* mask, std::size_t ch, SignalTrace& out,
                        URBG& rng) {
    const std::size_t n = mdl.probabilities.size();
    for (std::size_t i = 0; i < out.horizon(); ++i) {
        std::uint64_t allowed = mask ? mask->allowed[i] : ~std::uint64_t{0};
        double total = 0.0;
        std::size_t count = 0;
        for (std::size_t s = 0; s < n; ++s)
            if (allowed >> s & 1U) {
                total += mdl.probabilities[s];
                ++count;
            }
        if (count == 0) throw std::invalid_argument("sample_trace: empty allowed set");
        // Renormalize over the allowed set; all-zero mass falls back to uniform.
        bool uniform = !(total > 0);
        double r = uniform01(rng) * (uniform ? static_cast<double>(count) : total);
        std::size_t pick = n;
        for (std::size_t s = 0; s < n; ++s) {
            if (!(allowed >> s & 1U)) continue;
            pick = s;
            r -= uniform ? 1.0 : mdl.probabilities[s];
            if (r < 0) break;
        }
        out.set_symbol(ch, i, pick);
    }
}

template <class URBG>
void sample_gp(const GaussianProcessModel& mdl, const ContinuousBounds* bounds, std::size_t ch, SignalTrace& out,
               URBG& rng) {
    const std::size_t m = out.horizon();
    constexpr double inf = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd k = se_kernel(m, out.dt(), mdl.variance, mdl.length);

    std::vector<std::size_t> obs, free;
    for (std::size_t i = 0; i < m; ++i) {
        if (bounds && bounds->lo[i] == bounds->hi[i]) obs.push_back(i);
        else free.push_back(i);
    }
    if (obs.size() > m) throw std::invalid_argument("GP: more observations than steps");

    const auto no = static_cast<Eigen::Index>(obs.size());
    const auto nf = static_cast<Eigen::Index>(free.size());
    Eigen::VectorXd mu = Eigen::VectorXd::Constant(nf, mdl.mean);
    Eigen::MatrixXd cov(nf, nf);
    for (Eigen::Index a = 0; a < nf; ++a)
        for (Eigen::Index b = 0; b < nf; ++b) cov(a, b) = k(free[a], free[b]);

    if (no > 0) {
        Eigen::MatrixXd koo(no, no), kfo(nf, no);
        Eigen::VectorXd xo(no);
        for (Eigen::Index a = 0; a < no; ++a) {
            xo[a] = bounds->lo[obs[a]] - mdl.mean;
            for (Eigen::Index b = 0; b < no; ++b) koo(a, b) = k(obs[a], obs[b]);
        }
        koo.diagonal().array() += kGpJitter * mdl.variance;
        for (Eigen::Index a = 0; a < nf; ++a)
            for (Eigen::Index b = 0; b < no; ++b) kfo(a, b) = k(free[a], obs[b]);
        Eigen::LLT<Eigen::MatrixXd> llt(koo);
        if (llt.info() != Eigen::Success) throw std::runtime_error("GP: observation covariance not positive definite");
        if (nf > 0) {
            mu += kfo * llt.solve(xo);
            cov -= kfo * llt.solve(kfo.transpose());
            cov = 0.5 * (cov + cov.transpose());
        }
    }

    Eigen::VectorXd lo = Eigen::VectorXd::Constant(nf, -inf), hi = Eigen::VectorXd::Constant(nf, inf);
    if (bounds)
        for (Eigen::Index a = 0; a < nf; ++a) {
            lo[a] = bounds->lo[free[a]];
            hi[a] = bounds->hi[free[a]];
        }
    Eigen::VectorXd x = nf > 0 ? truncated_mvn_sample(mu, cov, lo, hi, rng) : Eigen::VectorXd();
    for (Eigen::Index a = 0; a < no; ++a) out.set_real(ch, obs[a], bounds->lo[obs[a]]);
    for (Eigen::Index a = 0; a < nf; ++a) out.set_real(ch, free[a], x[a]);
}

}  // namespace detail

/// One trace of m steps from the model, restricted to `constraints` when given.
template <class URBG>
SignalTrace sample_trace(const DisturbanceModel& model, std::size_t m, double dt, const ConstraintSet* constraints,
                         URBG& rng) {
    SignalTrace out(model.channels, m, dt);
    if (constraints && constraints->horizon() != m) throw std::invalid_argument("sample_trace: constraint horizon mismatch");
    if (constraints && !constraints->feasible()) throw std::invalid_argument("sample_trace: infeasible constraint set");
    for (std::size_t ch = 0; ch < model.channels.size(); ++ch) {
        const ConstraintSet::Entry* entry = nullptr;
        if (constraints) entry = &constraints->entry(require_channel(constraints->channels(), model.channels[ch].id));
        const auto* bounds = entry ? std::get_if<ContinuousBounds>(entry) : nullptr;
        const auto& mdl = model.models[ch];
        if (auto c = std::get_if<CategoricalModel>(&mdl)) {
            detail::sample_categorical(*c, entry ? &std::get<SymbolMask>(*entry) : nullptr, ch, out, rng);
        } else if (auto u = std::get_if<UniformModel>(&mdl)) {
            for (std::size_t i = 0; i < m; ++i) {
                double l = bounds ? std::max(u->lo, bounds->lo[i]) : u->lo;
                double h = bounds ? std::min(u->hi, bounds->hi[i]) : u->hi;
                if (!(l <= h)) throw std::invalid_argument("sample_trace: constraint outside uniform support");
                out.set_real(ch, i, l == h ? l : std::uniform_real_distribution<double>(l, h)(rng));
            }
        } else if (auto n = std::get_if<NormalModel>(&mdl)) {
            constexpr double inf = std::numeric_limits<double>::infinity();
            double sd = std::sqrt(n->variance);
            for (std::size_t i = 0; i < m; ++i)
                out.set_real(ch, i, sample_truncated_normal(n->mean, sd, bounds ? bounds->lo[i] : -inf,
                                                            bounds ? bounds->hi[i] : inf, rng));
        } else {
            detail::sample_gp(std::get<GaussianProcessModel>(mdl), bounds, ch, out, rng);
        }
    }
    return out;
}

/// Log density (log probability for categorical channels) of the unconstrained model.
inline double log_likelihood(const DisturbanceModel& model, const SignalTrace& trace) {
    const std::size_t m = trace.horizon();
    constexpr double inf = std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (std::size_t j = 0; j < model.channels.size(); ++j) {
        std::size_t ch = trace.channel(model.channels[j].id);
        const auto& mdl = model.models[j];
        if (auto c = std::get_if<CategoricalModel>(&mdl)) {
            for (std::size_t i = 0; i < m; ++i) total += std::log(c->probabilities.at(trace.symbol(ch, i)));
        } else if (auto u = std::get_if<UniformModel>(&mdl)) {
            for (std::size_t i = 0; i < m; ++i) {
                double v = trace.real(ch, i);
                if (v < u->lo || v > u->hi) return -inf;
                total -= std::log(u->hi - u->lo);
            }
        } else if (auto n = std::get_if<NormalModel>(&mdl)) {
            for (std::size_t i = 0; i < m; ++i) {
                double d = trace.real(ch, i) - n->mean;
                total += -0.5 * d * d / n->variance - 0.5 * std::log(2 * std::numbers::pi * n->variance);
            }
        } else {
            const auto& g = std::get<GaussianProcessModel>(mdl);
            Eigen::VectorXd x(m);
            for (std::size_t i = 0; i < m; ++i) x[static_cast<Eigen::Index>(i)] = trace.real(ch, i);
            Eigen::MatrixXd k = se_kernel(m, trace.dt(), g.variance, g.length);
            // mvn_log_density adds the jitter.
            total += mvn_log_density(x, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m), g.mean), k);
        }
    }
    return total;
}

}  // namespace stlf
