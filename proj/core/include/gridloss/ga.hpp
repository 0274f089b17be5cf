#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gridloss/loss.hpp"
#include "gridloss/network.hpp"
#include "gridloss/solver.hpp"

namespace gridloss {

enum class ControlKind { GeneratorVoltage, GeneratorRealPower, TransformerTap };

const char* to_string(ControlKind kind);

/// One bounded control variable. Generator controls reference `bus`;
/// transformer taps reference the branch (bus, to_bus). Bounds are in the
/// variable's natural per-unit quantity.
struct ControlVariable {
    ControlKind kind = ControlKind::GeneratorVoltage;
    int bus = 0;
    int to_bus = 0;
    double lower = 0.0;
    double upper = 0.0;
    int bits = 5;
};

/// Fixed-length bit string over the ordered control list, MSB first per slice.
using Chromosome = std::vector<std::uint8_t>;

struct GaConfig {
    int population_size = 50;       // even
    int max_generations = 100;
    double crossover_rate = 0.9;
    double mutation_initial = 0.9;
    double beta = 0.05;             // mutation decay constant
    int elite_count = 2;
    std::uint64_t rng_seed = 1;
    std::vector<ControlVariable> controls;
};

/// Deterministic uniform draws over std::mt19937_64. The raw engine is pinned
/// by the standard, so streams are identical across platforms; the helpers
/// avoid std::uniform_*_distribution, whose output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in [0, 1), 53-bit resolution.
    double next_double();

    /// Uniform in [0, n); n >= 1.
    std::size_t next_index(std::size_t n);

private:
    std::mt19937_64 gen_;
};

int chromosome_length(std::span<const ControlVariable> controls);

/// Each control's bit slice read MSB-first as an integer D and mapped affinely
/// onto [lower, upper] with resolution (upper-lower)/(2^bits - 1).
std::vector<double> decode(const Chromosome& chromosome,
                           std::span<const ControlVariable> controls);

/// Pure transformation: voltage controls set v_set, power controls set p_gen,
/// tap controls set the branch tap. Throws StrategyError-like std::runtime_error
/// when a referenced bus/branch does not exist.
Network apply_controls(const Network& net, std::span<const ControlVariable> controls,
                       std::span<const double> values);

/// Fitness assigned to candidates whose load flow fails to converge; strictly
/// worse than any converged loss.
inline constexpr double kNonConvergedFitness = 1e-9;

/// Decode, apply, solve: 1 / (1 + total real loss in pu) when converged,
/// kNonConvergedFitness otherwise. Higher is better.
double fitness(const Network& net, std::span<const ControlVariable> controls,
               const Chromosome& chromosome, const SolverOptions& solver_options);

std::vector<Chromosome> init_population(const GaConfig& config, Rng& rng);

/// Roulette wheel: member i selected with probability fitness_i / sum(fitness).
/// All fitnesses must be positive.
const Chromosome& select_parent(std::span<const Chromosome> population,
                                std::span<const double> fitnesses, Rng& rng);

/// Single-point crossover with the given probability; the cut is uniform in
/// [1, L-1]. Otherwise children are copies of the parents.
std::pair<Chromosome, Chromosome> crossover(const Chromosome& parent_a,
                                            const Chromosome& parent_b,
                                            double rate, Rng& rng);

/// mutation_initial * exp(-beta * generation).
double mutation_rate(int generation, const GaConfig& config);

/// Each bit flips independently with the given probability. Always consumes
/// exactly chromosome-length draws, so the RNG stream is a pure function of
/// the population structure.
Chromosome mutate(const Chromosome& chromosome, double rate, Rng& rng);

struct GenerationStats {
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    double best_loss_mw = 0.0;  // best-ever, non-increasing by elitism
};

struct OpfResult {
    Chromosome best_chromosome;
    std::vector<double> best_controls;
    double best_loss_mw = 0.0;
    std::vector<GenerationStats> history;  // entry per evaluated generation
    LoadFlowSolution solution;             // load flow at the optimum
    std::int64_t evaluations = 0;          // total fitness calls
};

/// Elitist generational GA minimizing total real line loss. All stochastic
/// draws happen on one deterministic stream in a fixed order; fitness
/// evaluation draws nothing, so results are identical for any worker count.
OpfResult run_ga(const Network& net, const GaConfig& config,
                 const SolverOptions& solver_options = {}, int workers = 1);

/// Config file: [ga] section with population/generations/crossover/
/// mutation_initial/beta/elite/seed keys, [controls] rows
/// `kind ref lower upper bits` with kind in {gen_voltage, gen_power, tap}
/// and ref a bus id or from-to branch designation.
GaConfig load_ga_config(std::istream& source);
GaConfig load_ga_config_file(const std::string& path);

/// The bundled IEEE-30 reproduction setup: five generator voltage set-points,
/// five generator outputs bounded at study unit ratings, four transformer taps.
GaConfig default_ieee30_ga_config();

}  // namespace gridloss
