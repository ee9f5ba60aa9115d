#pragma once

#include "latentsearch/latent.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>

namespace latentsearch {

/// Black-box score Q(G(z)) seen as a single function of the latent vector.
///
/// `evaluate` checks the input length and rejects non-finite results; concrete
/// objectives only implement `score`. Implementations that keep mutable state
/// must report `concurrency_safe() == false`.
class Objective {
  public:
    virtual ~Objective() = default;

    virtual std::size_t dimension() const = 0;
    virtual bool deterministic() const { return true; }
    virtual bool concurrency_safe() const { return true; }
    virtual std::string name() const = 0;

    Score evaluate(const LatentVector& z);

  protected:
    virtual double score(std::span<const double> z) = 0;
};

/// score = -||z - target||^2. Unique maximizer at target.
class SphereObjective final : public Objective {
  public:
    explicit SphereObjective(LatentVector target);

    std::size_t dimension() const override { return target_.size(); }
    std::string name() const override { return "sphere"; }
    const LatentVector& target() const noexcept { return target_; }

  protected:
    double score(std::span<const double> z) override;

  private:
    LatentVector target_;
};

/// score = sum_i floor(steps * z_i) / steps. Piecewise constant with wide plateaus.
class StaircaseObjective final : public Objective {
  public:
    StaircaseObjective(std::size_t dimension, int steps);

    std::size_t dimension() const override { return dimension_; }
    std::string name() const override { return "staircase"; }

  protected:
    double score(std::span<const double> z) override;

  private:
    std::size_t dimension_;
    int steps_;
};

/// Negated Rastrigin function centred on `center`; maximum 0 at the center.
class RastriginObjective final : public Objective {
  public:
    RastriginObjective(LatentVector center, double amplitude = 10.0);

    std::size_t dimension() const override { return center_.size(); }
    std::string name() const override { return "rastrigin"; }

  protected:
    double score(std::span<const double> z) override;

  private:
    LatentVector center_;
    double amplitude_;
};

class ConstantObjective final : public Objective {
  public:
    ConstantObjective(std::size_t dimension, double value);

    std::size_t dimension() const override { return dimension_; }
    std::string name() const override { return "constant"; }

  protected:
    double score(std::span<const double>) override { return value_; }

  private:
    std::size_t dimension_;
    double value_;
};

/// score = z[0].
class FirstCoordinateObjective final : public Objective {
  public:
    explicit FirstCoordinateObjective(std::size_t dimension);

    std::size_t dimension() const override { return dimension_; }
    std::string name() const override { return "first-coordinate"; }

  protected:
    double score(std::span<const double> z) override { return z[0]; }

  private:
    std::size_t dimension_;
};

/// Returns 0, 1, 2, ... on successive calls, so with a cached incumbent every
/// proposal strictly improves. Turns drift bounds into directly measurable quantities.
class AlwaysAcceptObjective final : public Objective {
  public:
    explicit AlwaysAcceptObjective(std::size_t dimension);

    std::size_t dimension() const override { return dimension_; }
    bool deterministic() const override { return false; }
    bool concurrency_safe() const override { return false; }
    std::string name() const override { return "always-accept"; }

  protected:
    double score(std::span<const double>) override { return static_cast<double>(calls_++); }

  private:
    std::size_t dimension_;
    std::uint64_t calls_ = 0;
};

/// Adapts any callable.
class FunctionObjective final : public Objective {
  public:
    using Function = std::function<double(std::span<const double>)>;

    FunctionObjective(std::size_t dimension, Function fn, std::string name = "function",
                      bool deterministic = true);

    std::size_t dimension() const override { return dimension_; }
    bool deterministic() const override { return deterministic_; }
    bool concurrency_safe() const override { return false; }
    std::string name() const override { return name_; }

  protected:
    double score(std::span<const double> z) override { return fn_(z); }

  private:
    std::size_t dimension_;
    Function fn_;
    std::string name_;
    bool deterministic_;
};

/// Forwards to another objective and counts calls.
class CountingObjective final : public Objective {
  public:
    explicit CountingObjective(Objective& inner) : inner_(inner) {}

    std::size_t dimension() const override { return inner_.dimension(); }
    bool deterministic() const override { return inner_.deterministic(); }
    bool concurrency_safe() const override { return false; }
    std::string name() const override { return inner_.name(); }

    std::uint64_t calls() const noexcept { return calls_; }

  protected:
    double score(std::span<const double> z) override;

  private:
    Objective& inner_;
    std::uint64_t calls_ = 0;
};

} // namespace latentsearch
