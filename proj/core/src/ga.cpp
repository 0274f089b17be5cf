#include "gridloss/ga.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

namespace gridloss {

const char* to_string(ControlKind kind) {
    switch (kind) {
        case ControlKind::GeneratorVoltage: return "gen_voltage";
        case ControlKind::GeneratorRealPower: return "gen_power";
        case ControlKind::TransformerTap: return "tap";
    }
    return "?";
}

double Rng::next_double() {
    // 53 uniform bits mapped onto [0, 1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

std::size_t Rng::next_index(std::size_t n) {
    assert(n >= 1);
    return static_cast<std::size_t>(next_double() * static_cast<double>(n));
}

int chromosome_length(std::span<const ControlVariable> controls) {
    int total = 0;
    for (const auto& c : controls) total += c.bits;
    return total;
}

std::vector<double> decode(const Chromosome& chromosome,
                           std::span<const ControlVariable> controls) {
    assert(static_cast<int>(chromosome.size()) == chromosome_length(controls));
    std::vector<double> values;
    values.reserve(controls.size());
    std::size_t pos = 0;
    for (const auto& c : controls) {
        std::uint64_t d = 0;
        for (int b = 0; b < c.bits; ++b) d = (d << 1) | chromosome[pos++];
        const double span = c.upper - c.lower;
        const double denom = static_cast<double>((std::uint64_t{1} << c.bits) - 1);
        values.push_back(c.lower + span * static_cast<double>(d) / denom);
    }
    return values;
}

Network apply_controls(const Network& net, std::span<const ControlVariable> controls,
                       std::span<const double> values) {
    assert(controls.size() == values.size());
    Network out = net;
    for (std::size_t k = 0; k < controls.size(); ++k) {
        const auto& c = controls[k];
        switch (c.kind) {
            case ControlKind::GeneratorVoltage: {
                const int i = out.index_of(c.bus);
                if (i < 0) throw std::runtime_error("control references unknown bus "
                                                    + std::to_string(c.bus));
                out.buses[i].v_set = values[k];
                break;
            }
            case ControlKind::GeneratorRealPower: {
                const int i = out.index_of(c.bus);
                if (i < 0) throw std::runtime_error("control references unknown bus "
                                                    + std::to_string(c.bus));
                out.buses[i].p_gen = values[k];
                break;
            }
            case ControlKind::TransformerTap: {
                const int b = out.branch_between(c.bus, c.to_bus);
                if (b < 0) throw std::runtime_error("control references unknown branch "
                                                    + std::to_string(c.bus) + "-"
                                                    + std::to_string(c.to_bus));
                out.branches[b].tap = values[k];
                break;
            }
        }
    }
    return out;
}

namespace {

struct Evaluation {
    double fitness = kNonConvergedFitness;
    double loss_pu = std::numeric_limits<double>::infinity();
    bool converged = false;
};

Evaluation evaluate(const Network& net, std::span<const ControlVariable> controls,
                    const Chromosome& chromosome, const SolverOptions& options) {
    const Network candidate = apply_controls(net, controls, decode(chromosome, controls));
    const auto sol = solve(candidate, options);
    Evaluation e;
    if (!sol.converged) return e;
    double loss = 0.0;
    for (const auto& f : branch_flows(sol.state, candidate)) loss += f.p_loss;
    e.converged = true;
    e.loss_pu = loss;
    e.fitness = 1.0 / (1.0 + loss);
    return e;
}

}  // namespace

double fitness(const Network& net, std::span<const ControlVariable> controls,
               const Chromosome& chromosome, const SolverOptions& solver_options) {
    return evaluate(net, controls, chromosome, solver_options).fitness;
}

std::vector<Chromosome> init_population(const GaConfig& config, Rng& rng) {
    const int len = chromosome_length(config.controls);
    std::vector<Chromosome> pop(config.population_size);
    for (auto& c : pop) {
        c.resize(len);
        for (auto& bit : c) bit = rng.next_double() < 0.5 ? 1 : 0;
    }
    return pop;
}

const Chromosome& select_parent(std::span<const Chromosome> population,
                                std::span<const double> fitnesses, Rng& rng) {
    assert(!population.empty() && population.size() == fitnesses.size());
    const double total = std::accumulate(fitnesses.begin(), fitnesses.end(), 0.0);
    const double target = rng.next_double() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < population.size(); ++i) {
        acc += fitnesses[i];
        if (target < acc) return population[i];
    }
    return population.back();  // numerical edge: target == total
}

std::pair<Chromosome, Chromosome> crossover(const Chromosome& parent_a,
                                            const Chromosome& parent_b,
                                            double rate, Rng& rng) {
    assert(parent_a.size() == parent_b.size());
    std::pair<Chromosome, Chromosome> children{parent_a, parent_b};
    if (parent_a.size() < 2) return children;
    if (rng.next_double() < rate) {
        const std::size_t cut = 1 + rng.next_index(parent_a.size() - 1);
        for (std::size_t i = cut; i < parent_a.size(); ++i) {
            children.first[i] = parent_b[i];
            children.second[i] = parent_a[i];
        }
    }
    return children;
}

double mutation_rate(int generation, const GaConfig& config) {
    return config.mutation_initial * std::exp(-config.beta * generation);
}

Chromosome mutate(const Chromosome& chromosome, double rate, Rng& rng) {
    Chromosome out = chromosome;
    for (auto& bit : out) {
        if (rng.next_double() < rate) bit ^= 1;
    }
    return out;
}

OpfResult run_ga(const Network& net, const GaConfig& config,
                 const SolverOptions& solver_options, int workers) {
    assert(config.population_size >= 2 && config.population_size % 2 == 0);
    assert(config.elite_count >= 1 && config.elite_count < config.population_size);
    workers = std::max(1, workers);

    Rng rng(config.rng_seed);
    std::vector<Chromosome> population = init_population(config, rng);
    std::vector<Evaluation> evals(population.size());

    OpfResult result;
    result.best_loss_mw = std::numeric_limits<double>::infinity();
    double best_loss_pu = std::numeric_limits<double>::infinity();

    // fitness evaluations draw nothing from the RNG, so splitting them over
    // any worker count cannot change the run
    auto evaluate_population = [&]() {
        const std::size_t count = population.size();
        if (workers == 1) {
            for (std::size_t i = 0; i < count; ++i) {
                evals[i] = evaluate(net, config.controls, population[i], solver_options);
            }
        } else {
            std::vector<std::thread> pool;
            const std::size_t chunk = (count + workers - 1) / workers;
            for (int w = 0; w < workers; ++w) {
                const std::size_t lo = w * chunk;
                const std::size_t hi = std::min(count, lo + chunk);
                if (lo >= hi) break;
                pool.emplace_back([&, lo, hi] {
                    for (std::size_t i = lo; i < hi; ++i) {
                        evals[i] = evaluate(net, config.controls, population[i],
                                            solver_options);
                    }
                });
            }
            for (auto& t : pool) t.join();
        }
        result.evaluations += static_cast<std::int64_t>(count);

        // best-ever bookkeeping in index order keeps ties deterministic
        for (std::size_t i = 0; i < count; ++i) {
            if (evals[i].converged && evals[i].loss_pu < best_loss_pu) {
                best_loss_pu = evals[i].loss_pu;
                result.best_chromosome = population[i];
            }
        }
        GenerationStats stats;
        double sum = 0.0;
        double best_fit = 0.0;
        for (const auto& e : evals) {
            sum += e.fitness;
            best_fit = std::max(best_fit, e.fitness);
        }
        stats.best_fitness = best_fit;
        stats.mean_fitness = sum / static_cast<double>(count);
        stats.best_loss_mw = best_loss_pu * net.base_mva;
        result.history.push_back(stats);
    };

    evaluate_population();

    for (int gen = 0; gen < config.max_generations; ++gen) {
        const double rate = mutation_rate(gen, config);

        std::vector<std::size_t> order(population.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return evals[a].fitness > evals[b].fitness;
        });

        std::vector<double> fits(population.size());
        for (std::size_t i = 0; i < population.size(); ++i) fits[i] = evals[i].fitness;

        std::vector<Chromosome> next;
        next.reserve(population.size());
        for (int e = 0; e < config.elite_count; ++e) {
            next.push_back(population[order[e]]);
        }
        while (next.size() < population.size()) {
            const Chromosome& a = select_parent(population, fits, rng);
            const Chromosome& b = select_parent(population, fits, rng);
            auto [child_a, child_b] = crossover(a, b, config.crossover_rate, rng);
            next.push_back(mutate(child_a, rate, rng));
            if (next.size() < population.size()) {
                next.push_back(mutate(child_b, rate, rng));
            }
        }
        population = std::move(next);
        evaluate_population();
    }

    result.best_loss_mw = best_loss_pu * net.base_mva;
    result.best_controls = decode(result.best_chromosome, config.controls);
    const Network best_net = apply_controls(net, config.controls, result.best_controls);
    result.solution = solve(best_net, solver_options);
    return result;
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::string body = line;
    if (auto pos = body.find('#'); pos != std::string::npos) body.erase(pos);
    std::istringstream in(body);
    std::vector<std::string> toks;
    std::string t;
    while (in >> t) toks.push_back(t);
    return toks;
}

}  // namespace

GaConfig load_ga_config(std::istream& source) {
    GaConfig cfg;
    cfg.controls.clear();
    enum class Section { None, Ga, Controls } section = Section::None;
    std::string line;
    int lineno = 0;
    while (std::getline(source, line)) {
        ++lineno;
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (toks[0] == "[ga]") { section = Section::Ga; continue; }
        if (toks[0] == "[controls]") { section = Section::Controls; continue; }
        if (toks[0].front() == '[') {
            throw std::runtime_error("ga config line " + std::to_string(lineno)
                                     + ": unknown section " + toks[0]);
        }
        if (section == Section::Ga) {
            auto eq = toks[0].find('=');
            if (toks.size() != 1 || eq == std::string::npos) {
                throw std::runtime_error("ga config line " + std::to_string(lineno)
                                         + ": expected key=value");
            }
            const std::string key = toks[0].substr(0, eq);
            const std::string val = toks[0].substr(eq + 1);
            if (key == "population") cfg.population_size = std::stoi(val);
            else if (key == "generations") cfg.max_generations = std::stoi(val);
            else if (key == "crossover") cfg.crossover_rate = std::stod(val);
            else if (key == "mutation_initial") cfg.mutation_initial = std::stod(val);
            else if (key == "beta") cfg.beta = std::stod(val);
            else if (key == "elite") cfg.elite_count = std::stoi(val);
            else if (key == "seed") cfg.rng_seed = std::stoull(val);
            else {
                throw std::runtime_error("ga config line " + std::to_string(lineno)
                                         + ": unknown key '" + key + "'");
            }
        } else if (section == Section::Controls) {
            if (toks.size() != 5) {
                throw std::runtime_error("ga config line " + std::to_string(lineno)
                                         + ": control row needs `kind ref lower upper bits`");
            }
            ControlVariable c;
            if (toks[0] == "gen_voltage") c.kind = ControlKind::GeneratorVoltage;
            else if (toks[0] == "gen_power") c.kind = ControlKind::GeneratorRealPower;
            else if (toks[0] == "tap") c.kind = ControlKind::TransformerTap;
            else {
                throw std::runtime_error("ga config line " + std::to_string(lineno)
                                         + ": unknown control kind '" + toks[0] + "'");
            }
            if (c.kind == ControlKind::TransformerTap) {
                auto dash = toks[1].find('-');
                if (dash == std::string::npos) {
                    throw std::runtime_error("ga config line " + std::to_string(lineno)
                                             + ": tap ref must be from-to");
                }
                c.bus = std::stoi(toks[1].substr(0, dash));
                c.to_bus = std::stoi(toks[1].substr(dash + 1));
            } else {
                c.bus = std::stoi(toks[1]);
            }
            c.lower = std::stod(toks[2]);
            c.upper = std::stod(toks[3]);
            c.bits = std::stoi(toks[4]);
            if (!(c.lower < c.upper) || c.bits < 1) {
                throw std::runtime_error("ga config line " + std::to_string(lineno)
                                         + ": need lower < upper and bits >= 1");
            }
            cfg.controls.push_back(c);
        } else {
            throw std::runtime_error("ga config line " + std::to_string(lineno)
                                     + ": data before any section header");
        }
    }
    return cfg;
}

GaConfig load_ga_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open ga config: " + path);
    return load_ga_config(in);
}

GaConfig default_ieee30_ga_config() {
    GaConfig cfg;
    auto vctl = [](int bus) {
        return ControlVariable{ControlKind::GeneratorVoltage, bus, 0, 0.95, 1.10, 5};
    };
    auto pctl = [](int bus, double lo, double hi) {
        return ControlVariable{ControlKind::GeneratorRealPower, bus, 0, lo, hi, 5};
    };
    auto tctl = [](int from, int to) {
        return ControlVariable{ControlKind::TransformerTap, from, to, 0.90, 1.10, 5};
    };
    cfg.controls = {
        vctl(2), vctl(5), vctl(8), vctl(11), vctl(13),
        // unit ratings for the reproduction study; the slack machine covers
        // the residual balance
        pctl(2, 0.20, 0.40), pctl(5, 0.15, 0.24), pctl(8, 0.10, 0.17),
        pctl(11, 0.10, 0.14), pctl(13, 0.12, 0.19),
        tctl(4, 12), tctl(6, 9), tctl(6, 10), tctl(28, 27),
    };
    return cfg;
}

}  // namespace gridloss
