#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <future>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "latticeway/field.hpp"
#include "latticeway/lattice.hpp"
#include "latticeway/primes.hpp"
#include "latticeway/rates.hpp"
#include "latticeway/rational.hpp"
#include "latticeway/scheme.hpp"

namespace latticeway::netsim {

/// infeasible power pattern; the CLI maps this to its own exit code
struct PatternError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/**
 * Seeded generator: uniform field messages and Box-Muller Gaussians.
 * Identical seeds give identical draw sequences on a fixed build, which
 * is all the reproducibility contract asks for.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    long long uniform_field(long long p) { return static_cast<long long>(eng_() % static_cast<std::uint64_t>(p)); }

    double uniform01() {  // in (0, 1]
        return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0;
};

enum class Duplex { full, half };

/**
 * Line network 1 - 2 - ... - V with unit channel gains: per-node power
 * budgets and noise variances, and the duplex mode. Each node hears only
 * its neighbors; its own transmission is subtracted out by assumption.
 */
struct NetworkConfig {
    int nodes = 4;
    std::vector<double> powers;
    std::vector<double> noise_variances;
    Duplex duplex = Duplex::full;

    void validate() const {
        if (nodes < 3) throw std::invalid_argument("network needs at least 3 nodes");
        if (static_cast<int>(powers.size()) != nodes || static_cast<int>(noise_variances.size()) != nodes)
            throw std::invalid_argument("powers/noise_variances must list one entry per node");
        for (double p : powers)
            if (!(p > 0) || !std::isfinite(p)) throw std::invalid_argument("powers must be positive");
        for (double v : noise_variances)
            if (!(v >= 0) || !std::isfinite(v)) throw std::invalid_argument("noise variances must be >= 0");
    }
};

/**
 * Everything a run needs, derived once from the (already pattern-feasible)
 * powers: the shared nested-lattice spec, per-node codeword scales with
 * bit-exact integer ratios inside each aligned pair, and the integer pair
 * ratios themselves (N, M, ... in the paper's notation).
 */
struct ProtocolPlan {
    int node_count = 4;
    int dimension = 1;
    long long blocks = 10;
    double rate_sym = 1.0;
    long long prime = 5;
    std::vector<double> truncated_powers;
    std::vector<long long> pair_ratios;     // ratio of pair (j, j+2), j = 1..K
    std::vector<bool> pair_high_is_second;  // true when node j+2 carries the square
    std::vector<Rat> node_scales;           // theta_i
    double p = 1.0;                         // paper-normalized base scalings (reporting)
    double q = 1.0;
    LatticeSpec spec = LatticeSpec::cubic(1, 5, Rat(1));

    long long relay_count() const { return node_count - 2; }

    /// ratio between the two neighbor scales of relay r (r in 2..V-1)
    long long relay_alpha(int r) const { return pair_ratios[static_cast<std::size_t>(r - 2)]; }
};

/**
 * Detect the square-ratio layout and build the plan. Powers must already
 * satisfy the pattern (each pair ratio an integer squared); otherwise a
 * PatternError points the caller at the rates truncation first.
 */
inline ProtocolPlan plan_protocol(const NetworkConfig& config, double rate_sym, int dimension, long long blocks) {
    config.validate();
    if (!(rate_sym > 0) || dimension < 1 || blocks < 1)
        throw std::invalid_argument("rate_sym, dimension, blocks must be positive");

    const int v = config.nodes;
    ProtocolPlan plan;
    plan.node_count = v;
    plan.dimension = dimension;
    plan.blocks = blocks;
    plan.rate_sym = rate_sym;
    plan.truncated_powers = config.powers;

    plan.prime = nearest_prime(std::pow(2.0, static_cast<double>(dimension) * rate_sym));
    plan.spec = LatticeSpec::cubic(dimension, plan.prime, Rat(1));

    for (int j = 1; j + 2 <= v; ++j) {
        double pj = config.powers[static_cast<std::size_t>(j - 1)];
        double pj2 = config.powers[static_cast<std::size_t>(j + 1)];
        long long r = rates::square_ratio_root(std::max(pj, pj2), std::min(pj, pj2));
        if (r == 0)
            throw PatternError("power pattern infeasible for pair (" + std::to_string(j) + "," +
                               std::to_string(j + 2) + "); truncate powers first (rates)");
        if (mod_reduce(r, plan.prime) == 0)
            throw PatternError("pair ratio divisible by the codebook prime; raise rate_sym");
        plan.pair_ratios.push_back(r);
        plan.pair_high_is_second.push_back(pj2 >= pj);
    }

    // scales: exact integer ratios inside each parity family, base from the
    // family's lowest budget
    plan.node_scales.assign(static_cast<std::size_t>(v), Rat(1));
    for (int parity = 0; parity < 2; ++parity) {
        std::vector<int> members;
        for (int i = 1 + parity; i <= v; i += 2) members.push_back(i);
        std::vector<Rat> rel(members.size(), Rat(1));
        for (std::size_t k = 0; k + 1 < members.size(); ++k) {
            std::size_t pair_idx = static_cast<std::size_t>(members[k] - 1);
            long long r = plan.pair_ratios[pair_idx];
            rel[k + 1] = plan.pair_high_is_second[pair_idx] ? rel[k] * Rat(r) : rel[k] / Rat(r);
        }
        std::size_t lowest = 0;
        for (std::size_t k = 1; k < members.size(); ++k)
            if (config.powers[static_cast<std::size_t>(members[k] - 1)] <
                config.powers[static_cast<std::size_t>(members[lowest] - 1)])
                lowest = k;
        Rat base = Encoder::scale_for_power(config.powers[static_cast<std::size_t>(members[lowest] - 1)], plan.spec);
        double base_power = config.powers[static_cast<std::size_t>(members[lowest] - 1)];
        (parity == 0 ? plan.p : plan.q) = std::sqrt(base_power);
        for (std::size_t k = 0; k < members.size(); ++k)
            plan.node_scales[static_cast<std::size_t>(members[k] - 1)] = base * (rel[k] / rel[lowest]);
    }
    return plan;
}

/**
 * One channel use of the line network: every listener hears the sum of
 * its neighbors' transmissions plus Gaussian noise of its own variance.
 * Half-duplex mode rejects a node that transmits while its output is
 * consumed in the same slot. Deterministic given the generator state;
 * draws proceed in listener order.
 */
inline std::map<int, RealVector> awgn_step(const std::map<int, CodePoint>& transmissions,
                                           const std::set<int>& listeners, const NetworkConfig& config,
                                           int dimension, Rng& rng) {
    config.validate();
    std::map<int, RealVector> signals;
    for (const auto& [node, point] : transmissions) {
        if (node < 1 || node > config.nodes) throw std::invalid_argument("transmitter outside network");
        if (static_cast<int>(point.size()) != dimension) throw std::invalid_argument("dimension mismatch");
        signals.emplace(node, point.to_reals());
    }

    std::map<int, RealVector> received;
    for (int node : listeners) {
        if (node < 1 || node > config.nodes) throw std::invalid_argument("listener outside network");
        if (config.duplex == Duplex::half && transmissions.count(node))
            throw std::runtime_error("half-duplex conflict");
        RealVector y(static_cast<std::size_t>(dimension), 0.0);
        for (int nb : {node - 1, node + 1}) {
            auto it = signals.find(nb);
            if (it == signals.end()) continue;
            for (int j = 0; j < dimension; ++j) y[static_cast<std::size_t>(j)] += it->second[static_cast<std::size_t>(j)];
        }
        double sigma = std::sqrt(config.noise_variances[static_cast<std::size_t>(node - 1)]);
        for (int j = 0; j < dimension; ++j) y[static_cast<std::size_t>(j)] += sigma * rng.gaussian();
        received.emplace(node, std::move(y));
    }
    return received;
}

inline std::map<int, RealVector> awgn_step(const std::map<int, CodePoint>& transmissions,
                                           const std::set<int>& listeners, const NetworkConfig& config,
                                           int dimension, std::uint64_t seed) {
    Rng rng(seed);
    return awgn_step(transmissions, listeners, config, dimension, rng);
}

struct BlockTrace {
    long long block;
    int node;
    std::string role;               // end_a | relay | end_b
    std::string field_combination;  // decoded combination / recovered message
    int decode_ok;                  // 1 ok, 0 failed, -1 not applicable

    bool operator==(const BlockTrace&) const = default;
};

struct SimulationResult {
    long long blocks = 0;
    long long channel_uses = 0;
    double rate_sym = 0;
    long long delivered_a = 0;  // messages from node 1 recovered at the far end
    long long delivered_b = 0;
    long long errors_a = 0;
    long long errors_b = 0;
    std::map<std::string, long long> decode_failures;
    double throughput = 0;  // min-direction delivered * rate_sym per channel use
    std::vector<double> mean_power;  // empirical (1/n) E||X||^2 per node
    std::vector<BlockTrace> trace;

    bool operator==(const SimulationResult&) const = default;
};

namespace detail {

using KeyMap = std::map<std::string, long long>;  // slot -> coefficient mod P

inline KeyMap key_scale(const KeyMap& k, long long c, long long p) {
    KeyMap out;
    for (const auto& [slot, coeff] : k) {
        long long nc = mod_reduce(static_cast<long long>(static_cast<int128>(coeff) * c % p), p);
        if (nc != 0) out[slot] = nc;
    }
    return out;
}

inline KeyMap key_add(const KeyMap& a, const KeyMap& b, long long p) {
    KeyMap out = a;
    for (const auto& [slot, coeff] : b) {
        long long nc = mod_reduce(out.count(slot) ? out[slot] + coeff : coeff, p);
        if (nc == 0)
            out.erase(slot);
        else
            out[slot] = nc;
    }
    return out;
}

inline std::string key_str(const KeyMap& k) {
    if (k.empty()) return "0";
    std::string s;
    for (const auto& [slot, coeff] : k) {
        if (!s.empty()) s += "+";
        s += std::to_string(coeff) + "*" + slot;
    }
    return s;
}

inline CombinationKey key_to_combination(const KeyMap& k, long long p) {
    std::vector<std::pair<long long, std::string>> terms;
    for (const auto& [slot, coeff] : k) terms.emplace_back(coeff, slot);
    if (terms.empty()) terms.emplace_back(1, "zero");
    return CombinationKey(std::move(terms), p);
}

/**
 * The Block-Markov engine for a K-relay line. Every node's transmission
 * in a block is a scaled codeword; relays decode an integer combination
 * of their two neighbors' codewords, re-distribute it, and forward it in
 * the next block; end nodes decode point-to-point and peel the chain of
 * combinations with their own messages and earlier decodes.
 */
class ChainEngine {
public:
    ChainEngine(const ProtocolPlan& plan, const NetworkConfig& config, std::uint64_t seed)
        : plan_(plan),
          cfg_(config),
          msg_rng_(seed),
          noise_rng_(seed ^ 0x9e3779b97f4a7c15ULL),
          v_(plan.node_count) {
        cfg_.validate();
        if (cfg_.nodes != plan.node_count) throw std::invalid_argument("plan/config node count mismatch");
        const long long P = plan_.prime;
        sent_label_.assign(static_cast<std::size_t>(v_ + 1), FieldElement(0, P));
        pending_label_ = sent_label_;
        sent_key_.assign(static_cast<std::size_t>(v_ + 1), KeyMap{});
        pending_key_ = sent_key_;
        pending_point_.assign(static_cast<std::size_t>(v_ + 1), CodePoint::zero(plan_.dimension));
        for (int r = 2; r <= v_ - 1; ++r)
            pending_point_[static_cast<std::size_t>(r)] =
                CodePoint::zero(plan_.dimension, scale(r) * plan_.spec.fine_step());
        power_acc_.assign(static_cast<std::size_t>(v_ + 1), 0.0);
    }

    SimulationResult run() {
        SimulationResult res;
        res.blocks = plan_.blocks;
        res.rate_sym = plan_.rate_sym;
        const long long P = plan_.prime;

        for (long long block = 1; block <= plan_.blocks; ++block) {
            // fresh end-node messages
            FieldElement wa(msg_rng_.uniform_field(P), P);
            FieldElement wb(msg_rng_.uniform_field(P), P);
            wa_.push_back(wa);
            wb_.push_back(wb);

            // transmissions
            std::map<int, CodePoint> tx;
            tx[1] = encode(wa, scale(1), plan_.spec);
            tx[v_] = encode(wb, scale(v_), plan_.spec);
            sent_label_[1] = wa;
            sent_label_[static_cast<std::size_t>(v_)] = wb;
            sent_key_[1] = KeyMap{{slot_name(true, block), 1}};
            sent_key_[static_cast<std::size_t>(v_)] = KeyMap{{slot_name(false, block), 1}};
            for (int r = 2; r <= v_ - 1; ++r) {
                tx[r] = pending_point_[static_cast<std::size_t>(r)];
                sent_label_[static_cast<std::size_t>(r)] = pending_label_[static_cast<std::size_t>(r)];
                sent_key_[static_cast<std::size_t>(r)] = pending_key_[static_cast<std::size_t>(r)];
            }
            for (const auto& [node, point] : tx) {
                double acc = 0;
                for (double x : point.to_reals()) acc += x * x;
                power_acc_[static_cast<std::size_t>(node)] += acc / plan_.dimension;
            }

            // channel
            std::map<int, RealVector> rx = channel(tx);

            // relay decode + re-distribution (for the next block)
            for (int r = 2; r <= v_ - 1; ++r) relay_step(block, r, rx, res);

            // end decode + peeling
            end_step(block, /*left=*/true, rx, res);
            end_step(block, /*left=*/false, rx, res);
        }

        res.channel_uses = cfg_.duplex == Duplex::half ? 2 * plan_.blocks : plan_.blocks;
        long long min_delivered = std::min(res.delivered_a, res.delivered_b);
        res.throughput = static_cast<double>(min_delivered) * plan_.rate_sym / static_cast<double>(res.channel_uses);
        res.mean_power.assign(static_cast<std::size_t>(v_), 0.0);
        for (int i = 1; i <= v_; ++i)
            res.mean_power[static_cast<std::size_t>(i - 1)] =
                power_acc_[static_cast<std::size_t>(i)] / static_cast<double>(plan_.blocks);
        return res;
    }

private:
    const ProtocolPlan& plan_;
    NetworkConfig cfg_;
    Rng msg_rng_;
    Rng noise_rng_;
    int v_;

    std::vector<FieldElement> sent_label_, pending_label_;
    std::vector<KeyMap> sent_key_, pending_key_;
    std::vector<CodePoint> pending_point_;
    std::vector<double> power_acc_;
    std::vector<FieldElement> wa_, wb_;  // truth, 1-based via index+1

    // per-end peeling chains: chains_[side][block] = h indexed by node position
    std::map<long long, std::vector<FieldElement>> chains_left_, chains_right_;

    Rat scale(int node) const { return plan_.node_scales[static_cast<std::size_t>(node - 1)]; }

    static std::string slot_name(bool dir_a, long long block) {
        return (dir_a ? "a" : "b") + std::to_string(block);
    }

    // relay r's low/high neighbor and the field coefficients it induces
    void relay_geometry(int r, int& lo, int& hi, long long& alpha) const {
        int left = r - 1, right = r + 1;
        alpha = plan_.relay_alpha(r);
        if (scale(left) <= scale(right)) {
            lo = left;
            hi = right;
        } else {
            lo = right;
            hi = left;
        }
    }

    long long coeff_for(int r, int neighbor) const {
        int lo, hi;
        long long alpha;
        relay_geometry(r, lo, hi, alpha);
        return neighbor == hi ? alpha : 1;
    }

    std::map<int, RealVector> channel(const std::map<int, CodePoint>& tx) {
        std::map<int, RealVector> rx;
        if (cfg_.duplex == Duplex::full) {
            std::set<int> all;
            for (int i = 1; i <= v_; ++i) all.insert(i);
            rx = awgn_step(tx, all, cfg_, plan_.dimension, noise_rng_);
        } else {
            // slot A: odd nodes transmit, even nodes listen; slot B mirrors
            for (int parity : {1, 0}) {
                std::map<int, CodePoint> slot_tx;
                std::set<int> slot_listen;
                for (const auto& [node, point] : tx)
                    if (node % 2 == parity) slot_tx.emplace(node, point);
                for (int i = 1; i <= v_; ++i)
                    if (i % 2 != parity) slot_listen.insert(i);
                auto part = awgn_step(slot_tx, slot_listen, cfg_, plan_.dimension, noise_rng_);
                for (auto& [node, y] : part) rx[node] = std::move(y);
            }
        }
        return rx;
    }

    void relay_step(long long block, int r, const std::map<int, RealVector>& rx, SimulationResult& res) {
        int lo, hi;
        long long alpha;
        relay_geometry(r, lo, hi, alpha);
        const RealVector& y = rx.at(r);

        // in block 1 only end nodes speak: a relay with one end neighbor
        // decodes it point-to-point, an interior relay hears nothing, and
        // the single-relay line (both neighbors ends) decodes the sum
        bool left_end = (r == 2), right_end = (r == v_ - 1);
        if (block == 1 && !(left_end || right_end)) return;

        DecodedCombination dc = [&] {
            if (block == 1 && !(left_end && right_end)) {
                int end = left_end ? 1 : v_;
                CodePoint point = decode_point_to_point(y, scale(end), plan_.spec);
                return DecodedCombination(std::move(point), scale(hi), alpha);
            }
            return decode_sum(y, alpha, scale(lo), plan_.spec);
        }();

        CodePoint out = redistribution_transform(dc, alpha, scale(r), plan_.spec);
        FieldElement next = phi_inverse(out, scale(r), plan_.spec);

        // link truth: combination of what the neighbors actually sent
        const long long P = plan_.prime;
        FieldElement truth = scale_message(coeff_for(r, lo), sent_label_[static_cast<std::size_t>(lo)]) +
                             scale_message(coeff_for(r, hi), sent_label_[static_cast<std::size_t>(hi)]);
        KeyMap truth_key = key_add(key_scale(sent_key_[static_cast<std::size_t>(lo)], coeff_for(r, lo), P),
                                   key_scale(sent_key_[static_cast<std::size_t>(hi)], coeff_for(r, hi), P), P);
        dc.key = key_to_combination(truth_key, P);

        bool ok = (next == truth);
        if (!ok) res.decode_failures["node" + std::to_string(r) + "_sum"]++;
        res.trace.push_back({block, r, "relay", key_str(truth_key), ok ? 1 : 0});

        pending_point_[static_cast<std::size_t>(r)] = std::move(out);
        pending_label_[static_cast<std::size_t>(r)] = next;
        pending_key_[static_cast<std::size_t>(r)] = std::move(truth_key);
    }

    FieldElement chain_value(bool left, long long block, int position) const {
        const auto& chains = left ? chains_left_ : chains_right_;
        auto it = chains.find(block);
        if (it == chains.end()) return FieldElement(0, plan_.prime);
        return it->second[static_cast<std::size_t>(position)];
    }

    FieldElement own_message(bool left, long long block) const {
        const auto& v = left ? wa_ : wb_;
        if (block < 1 || block > static_cast<long long>(v.size())) return FieldElement(0, plan_.prime);
        return v[static_cast<std::size_t>(block - 1)];
    }

    void end_step(long long block, bool left, const std::map<int, RealVector>& rx, SimulationResult& res) {
        const int self = left ? 1 : v_;
        const int relay = left ? 2 : v_ - 1;
        const long long P = plan_.prime;
        const long long K = plan_.relay_count();

        std::vector<FieldElement> h(static_cast<std::size_t>(v_ + 1), FieldElement(0, P));
        if (block >= 2) {
            CodePoint point = decode_point_to_point(rx.at(self), scale(relay), plan_.spec);
            FieldElement decoded = phi_inverse(point, scale(relay), plan_.spec);
            bool ok = (decoded == sent_label_[static_cast<std::size_t>(relay)]);
            if (!ok) res.decode_failures["node" + std::to_string(self) + "_point"]++;
            res.trace.push_back(
                {block, self, left ? "end_a" : "end_b", key_str(sent_key_[static_cast<std::size_t>(relay)]),
                 ok ? 1 : 0});
            h[static_cast<std::size_t>(relay)] = decoded;

            // peel the combination chain toward the far end
            if (left) {
                for (int m = 2; m <= v_ - 1; ++m) {
                    FieldElement known =
                        (m == 2) ? own_message(true, block - 1) : chain_value(true, block - 2, m - 1);
                    FieldElement rest =
                        h[static_cast<std::size_t>(m)] - scale_message(coeff_for(m, m - 1), known);
                    h[static_cast<std::size_t>(m + 1)] = solve_coefficient(rest, coeff_for(m, m + 1));
                }
            } else {
                for (int m = v_ - 1; m >= 2; --m) {
                    FieldElement known =
                        (m == v_ - 1) ? own_message(false, block - 1) : chain_value(false, block - 2, m + 1);
                    FieldElement rest =
                        h[static_cast<std::size_t>(m)] - scale_message(coeff_for(m, m + 1), known);
                    h[static_cast<std::size_t>(m - 1)] = solve_coefficient(rest, coeff_for(m, m - 1));
                }
            }
        } else {
            res.trace.push_back({block, self, left ? "end_a" : "end_b", "-", -1});
        }
        (left ? chains_left_ : chains_right_)[block] = h;

        // a message from the far end surfaces after K blocks of delay
        long long src_block = block - K;
        if (block >= 2 && src_block >= 1) {
            FieldElement recovered = h[static_cast<std::size_t>(left ? v_ : 1)];
            FieldElement truth = left ? wb_[static_cast<std::size_t>(src_block - 1)]
                                      : wa_[static_cast<std::size_t>(src_block - 1)];
            if (left) {
                res.delivered_b++;
                if (recovered != truth) res.errors_b++;
            } else {
                res.delivered_a++;
                if (recovered != truth) res.errors_a++;
            }
            res.trace.push_back({block, self, left ? "end_a" : "end_b",
                                 slot_name(!left, src_block) + "=" + std::to_string(recovered.value),
                                 recovered == truth ? 1 : 0});
        }
    }
};

}  // namespace detail

/// generic K-relay chain run (K = nodes - 2 >= 1)
inline SimulationResult run_chain(const ProtocolPlan& plan, const NetworkConfig& config, std::uint64_t seed) {
    detail::ChainEngine engine(plan, config, seed);
    return engine.run();
}

/// the two-relay scheme of the main theorem
inline SimulationResult run_two_relay(const ProtocolPlan& plan, const NetworkConfig& config, std::uint64_t seed) {
    if (plan.node_count != 4) throw std::invalid_argument("run_two_relay needs 4 nodes");
    return run_chain(plan, config, seed);
}

/// half-duplex schedule: two slots per block, odd/even alternation
inline SimulationResult run_half_duplex(const ProtocolPlan& plan, const NetworkConfig& config,
                                        std::uint64_t seed) {
    if (config.duplex != Duplex::half) throw std::invalid_argument("run_half_duplex needs duplex = half");
    return run_chain(plan, config, seed);
}

/**
 * The two-phase single-relay exchange: MAC phase decode-the-sum at the
 * relay, Re-distribution Transform, BC phase broadcast at the relay's
 * full power, and Lemma-1/2 recovery at both ends. Requires the
 * uplink layout P1 = N^2 p^2, P3 = p^2.
 */
inline SimulationResult run_single_relay_bc(const ProtocolPlan& plan, const NetworkConfig& config,
                                            std::uint64_t seed) {
    config.validate();
    if (plan.node_count != 3 || config.nodes != 3)
        throw std::invalid_argument("run_single_relay_bc needs 3 nodes");
    if (plan.node_scales[0] < plan.node_scales[2])
        throw PatternError("pattern mismatch: single-relay BC scheme expects P1 = N^2 p^2, P3 = p^2");

    const long long P = plan.prime;
    const long long n_ratio = plan.pair_ratios[0];
    Rng msg_rng(seed);
    Rng noise_rng(seed ^ 0x9e3779b97f4a7c15ULL);

    SimulationResult res;
    res.blocks = 2;
    res.channel_uses = 2;
    res.rate_sym = plan.rate_sym;
    res.mean_power.assign(3, 0.0);

    FieldElement wa(msg_rng.uniform_field(P), P);
    FieldElement wb(msg_rng.uniform_field(P), P);

    // MAC phase
    std::map<int, CodePoint> tx;
    tx[1] = encode(wa, plan.node_scales[0], plan.spec);
    tx[3] = encode(wb, plan.node_scales[2], plan.spec);
    auto rx = awgn_step(tx, {2}, config, plan.dimension, noise_rng);
    DecodedCombination dc = decode_sum(rx.at(2), n_ratio, plan.node_scales[2], plan.spec);
    FieldElement truth_sum = scale_message(n_ratio, wa) + wb;

    // BC phase
    CodePoint broadcast = redistribution_transform(dc, n_ratio, plan.node_scales[1], plan.spec);
    FieldElement relay_label = phi_inverse(broadcast, plan.node_scales[1], plan.spec);
    bool relay_ok = relay_label == truth_sum;
    if (!relay_ok) res.decode_failures["node2_sum"]++;
    res.trace.push_back({1, 2, "relay",
                         std::to_string(mod_reduce(n_ratio, P)) + "*a1+1*b1", relay_ok ? 1 : 0});

    std::map<int, CodePoint> tx2{{2, broadcast}};
    auto rx2 = awgn_step(tx2, {1, 3}, config, plan.dimension, noise_rng);

    for (int node : {1, 3}) {
        FieldElement u = phi_inverse(decode_point_to_point(rx2.at(node), plan.node_scales[1], plan.spec),
                                     plan.node_scales[1], plan.spec);
        bool point_ok = u == relay_label;
        if (!point_ok) res.decode_failures["node" + std::to_string(node) + "_point"]++;
        if (node == 1) {
            FieldElement rec = u - scale_message(n_ratio, wa);  // strip own, Lemma 1
            res.delivered_b++;
            if (rec != wb) res.errors_b++;
            res.trace.push_back({2, 1, "end_a", "b1=" + std::to_string(rec.value), rec == wb ? 1 : 0});
        } else {
            FieldElement rec = solve_coefficient(u - wb, n_ratio);  // Lemma 2
            res.delivered_a++;
            if (rec != wa) res.errors_a++;
            res.trace.push_back({2, 3, "end_b", "a1=" + std::to_string(rec.value), rec == wa ? 1 : 0});
        }
    }

    for (int node = 1; node <= 3; ++node) {
        const CodePoint& pt = node == 2 ? broadcast : tx.at(node);
        double acc = 0;
        for (double x : pt.to_reals()) acc += x * x;
        res.mean_power[static_cast<std::size_t>(node - 1)] = acc / plan.dimension / 2.0;
    }
    res.throughput = static_cast<double>(std::min(res.delivered_a, res.delivered_b)) * plan.rate_sym /
                     static_cast<double>(res.channel_uses);
    return res;
}

inline int thread_budget() {
    if (const char* env = std::getenv("LATTICEWAY_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Wilson 95% score interval for k successes in n trials
inline std::pair<double, double> wilson_interval(long long k, long long n) {
    if (n <= 0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    double phat = static_cast<double>(k) / static_cast<double>(n);
    double denom = 1.0 + z * z / static_cast<double>(n);
    double center = (phat + z * z / (2.0 * static_cast<double>(n))) / denom;
    double half = z *
                  std::sqrt(phat * (1.0 - phat) / static_cast<double>(n) +
                            z * z / (4.0 * static_cast<double>(n) * static_cast<double>(n))) /
                  denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct MonteCarloResult {
    long long trials = 0;
    SimulationResult first;  // trial with the base seed
    long long delivered_a = 0, delivered_b = 0;
    long long errors_a = 0, errors_b = 0;
    std::map<std::string, long long> decode_failures;
    double error_rate_a = 0, error_rate_b = 0;
    std::pair<double, double> wilson_a{0, 0}, wilson_b{0, 0};
};

/**
 * Independent seeded trials (seed, seed+1, ...), aggregated in seed order
 * so the result is deterministic no matter how many workers ran them.
 */
inline MonteCarloResult monte_carlo(const ProtocolPlan& plan, const NetworkConfig& config, long long trials,
                                    std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    auto one = [&](long long t) { return run_chain(plan, config, seed + static_cast<std::uint64_t>(t)); };

    std::vector<SimulationResult> results(static_cast<std::size_t>(trials));
    int workers = std::min<long long>(thread_budget(), trials);
    if (workers <= 1) {
        for (long long t = 0; t < trials; ++t) results[static_cast<std::size_t>(t)] = one(t);
    } else {
        std::vector<std::future<void>> futs;
        std::atomic<long long> next{0};
        for (int w = 0; w < workers; ++w)
            futs.push_back(std::async(std::launch::async, [&] {
                for (long long t = next.fetch_add(1); t < trials; t = next.fetch_add(1))
                    results[static_cast<std::size_t>(t)] = one(t);
            }));
        for (auto& f : futs) f.get();
    }

    MonteCarloResult mc;
    mc.trials = trials;
    mc.first = results[0];
    for (const auto& r : results) {
        mc.delivered_a += r.delivered_a;
        mc.delivered_b += r.delivered_b;
        mc.errors_a += r.errors_a;
        mc.errors_b += r.errors_b;
        for (const auto& [k, v] : r.decode_failures) mc.decode_failures[k] += v;
    }
    mc.error_rate_a = mc.delivered_a ? static_cast<double>(mc.errors_a) / static_cast<double>(mc.delivered_a) : 0.0;
    mc.error_rate_b = mc.delivered_b ? static_cast<double>(mc.errors_b) / static_cast<double>(mc.delivered_b) : 0.0;
    mc.wilson_a = wilson_interval(mc.errors_a, mc.delivered_a);
    mc.wilson_b = wilson_interval(mc.errors_b, mc.delivered_b);
    return mc;
}

}  // namespace latticeway::netsim
