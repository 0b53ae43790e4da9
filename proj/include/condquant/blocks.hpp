#pragma once

// Block families: structured codebooks assembled from per-region payloads.
//
// A block owns one region of the self-similar structure:
//   * NuOptimal(m): the optimal m-point set of the nu-copy C_w
//   * PCenter:      the single point S_w(E(P)) for the cylinder J_w
//   * PPair:        the scaled optimal two-point set S_w(alpha_2(P)) for J_w
//
// The F(n)-point families stack one nu-ladder per level plus a layer of
// centers; greedy refinement pops the block with the largest total error
// (ties by region word, then payload size) and upgrades its payload by one
// point: NuOptimal(m) -> NuOptimal(m+1), PCenter -> PPair, and PPair splits
// into the region's three-point structure {NuOptimal(1) on C_w, PCenter on
// J_w1, PCenter on J_w2}. Within the transition from F(t) to F(t+1) each
// block is poppable only below its size in the target family; the caps
// re-arm whenever the count crosses the next F boundary.

#include "numeric.hpp"
#include "nu_quantizer.hpp"
#include "system.hpp"

#include <functional>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace condquant {

enum class Payload { nu_optimal, p_center, p_pair };

struct Block {
    Word word;
    Payload payload = Payload::p_center;
    int nu_size = 0;  // only meaningful for nu_optimal
};

inline int block_point_count(const Block& b) {
    switch (b.payload) {
        case Payload::nu_optimal: return b.nu_size;
        case Payload::p_center: return 1;
        case Payload::p_pair: return 2;
    }
    return 0;
}

inline Rational block_error(Case c, const Block& b) {
    Rational scale = rpow(Rational(1, 75), long(b.word.size()));
    switch (b.payload) {
        case Payload::nu_optimal:
            return scale * nu_optimal_error(c, b.nu_size) / 3;
        case Payload::p_center: return scale * p_variance(c);
        case Payload::p_pair: return scale * p_two_means_error(c);
    }
    return Rational(0);
}

inline Rational block_per_point_error(Case c, const Block& b) {
    return block_error(c, b) / block_point_count(b);
}

inline std::vector<Rational> block_points(Case c, const Block& b) {
    Affine m = word_map(b.word);
    std::vector<Rational> pts;
    switch (b.payload) {
        case Payload::nu_optimal:
            for (const Rational& x : nu_optimal_points(c, b.nu_size))
                pts.push_back(m(x));
            break;
        case Payload::p_center:
            pts.push_back(m(p_moments(c).mean));
            break;
        case Payload::p_pair:
            for (const Rational& x : p_two_means_points(c)) pts.push_back(m(x));
            break;
    }
    return pts;
}

struct BlockFamily {
    Case cse = Case::discrete;
    std::vector<Block> blocks;

    long long total_count() const {
        long long n = 0;
        for (const Block& b : blocks) n += block_point_count(b);
        return n;
    }

    Rational total_error() const {
        Rational e = 0;
        for (const Block& b : blocks) e += block_error(cse, b);
        return e;
    }

    std::vector<Rational> points() const {
        std::vector<Rational> pts;
        for (const Block& b : blocks)
            for (Rational& x : block_points(cse, b)) pts.push_back(std::move(x));
        std::sort(pts.begin(), pts.end());
        return pts;
    }
};

// ---------------------------------------------------------------------------
// Counting sequences

struct Seq {
    long long a;  // nu-ladder index at the top level
    Int F;        // family point count
};

inline Seq seq(Case c, int n) {
    if (n < 0) throw std::domain_error("seq: n >= 0");
    if (c == Case::discrete)
        return {2LL * n, 5 * ipow(2, unsigned(n)) - 2 * n - 4};
    return {n == 0 ? 0LL : 2LL * n - 1,
            ipow(4, unsigned(n)) + ipow(2, unsigned(n + 1))};
}

// nu-copy size in family j of the ladder (j = 0 meaningful for uniform: 1).
inline long long nu_ladder_size(Case c, int j) {
    if (c == Case::discrete) {
        if (j < 1) throw std::domain_error("nu_ladder_size(discrete): j >= 1");
        return 2LL * j;
    }
    return j == 0 ? 1LL : (1LL << (2 * j - 1));
}

// Level of the poppable P-blocks while refining family t into family t+1.
inline int p_block_level(Case c, int t) {
    return c == Case::discrete ? t : t + 1;
}

namespace detail {

inline void append_words(int k, Word& w, std::vector<Word>& out) {
    if (k == 0) {
        out.push_back(w);
        return;
    }
    for (unsigned char d = 1; d <= 2; ++d) {
        w.push_back(d);
        append_words(k - 1, w, out);
        w.pop_back();
    }
}

inline std::vector<Word> words_of_length(int k) {
    std::vector<Word> out;
    Word w;
    out.reserve(size_t(1) << k);
    append_words(k, w, out);
    return out;
}

}  // namespace detail

// The structured F(n)-point family.
inline BlockFamily alpha_F(Case c, int n) {
    (void)seq(c, n);  // domain check
    BlockFamily fam{c, {}};
    int top = c == Case::discrete ? n - 1 : n;
    for (int k = 0; k <= top; ++k)
        for (Word& w : detail::words_of_length(k))
            fam.blocks.push_back(Block{std::move(w), Payload::nu_optimal,
                                       int(nu_ladder_size(c, n - k))});
    for (Word& w : detail::words_of_length(p_block_level(c, n)))
        fam.blocks.push_back(Block{std::move(w), Payload::p_center, 0});
    return fam;
}

// Closed form for the error of alpha_F(c, n); valid on the whole seq domain.
inline Rational v_F_closed(Case c, int n) {
    (void)seq(c, n);
    if (c == Case::discrete)
        return Rational(769208, 5884749) * rpow(Rational(2, 75), n) -
               Rational(64, 3339) * rpow(Rational(1, 64), n);
    return Rational(1, 129) * rpow(Rational(1, 16), n) -
           Rational(3473, 941700) * rpow(Rational(2, 75), n);
}

// ---------------------------------------------------------------------------
// Ordering

// Sort blocks by total error descending; ties by (region word, payload size)
// ascending. Returns the permuted family.
inline BlockFamily block_order(BlockFamily fam) {
    std::vector<std::pair<Rational, size_t>> keyed;
    keyed.reserve(fam.blocks.size());
    for (size_t i = 0; i < fam.blocks.size(); ++i)
        keyed.emplace_back(block_error(fam.cse, fam.blocks[i]), i);
    std::sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        const Block& x = fam.blocks[a.second];
        const Block& y = fam.blocks[b.second];
        if (x.word != y.word) return x.word < y.word;
        return block_point_count(x) < block_point_count(y);
    });
    BlockFamily out{fam.cse, {}};
    out.blocks.reserve(fam.blocks.size());
    for (const auto& [key, i] : keyed) out.blocks.push_back(fam.blocks[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Greedy refinement

namespace detail {

struct HeapEntry {
    Rational key;
    Word word;
    int size;
    size_t index;
    uint64_t version;
};

struct HeapWorse {  // priority_queue keeps the "largest"; define worse-than
    bool operator()(const HeapEntry& a, const HeapEntry& b) const {
        if (a.key != b.key) return a.key < b.key;
        if (a.word != b.word) return a.word > b.word;
        return a.size > b.size;
    }
};

class GreedyState {
  public:
    GreedyState(BlockFamily fam, int transition)
        : fam_(std::move(fam)), t_(transition) {
        versions_.assign(fam_.blocks.size(), 0);
        count_ = fam_.total_count();
        error_ = fam_.total_error();
        rearm();
    }

    long long count() const { return count_; }
    const Rational& error() const { return error_; }
    BlockFamily&& take_family() { return std::move(fam_); }

    // Perform one pop. Returns false if nothing is poppable (cannot happen
    // between family boundaries; guarded by the caller's boundary logic).
    bool pop() {
        while (!heap_.empty()) {
            HeapEntry top = heap_.top();
            heap_.pop();
            if (top.version != versions_[top.index]) continue;  // stale
            apply_pop(top.index);
            return true;
        }
        return false;
    }

    void advance_boundary_if_needed() {
        Int next = seq(fam_.cse, t_ + 1).F;
        if (Int(count_) == next) {
            ++t_;
            rearm();
        }
    }

  private:
    bool poppable(const Block& b) const {
        if (b.payload == Payload::nu_optimal) {
            int j = t_ + 1 - int(b.word.size());
            long long cap =
                (fam_.cse == Case::discrete)
                    ? (j >= 1 ? nu_ladder_size(fam_.cse, j) : 1)
                    : (j >= 0 ? nu_ladder_size(fam_.cse, j) : 1);
            return b.nu_size < cap;
        }
        return int(b.word.size()) == p_block_level(fam_.cse, t_);
    }

    void push_if_poppable(size_t i) {
        const Block& b = fam_.blocks[i];
        if (!poppable(b)) return;
        heap_.push(HeapEntry{block_error(fam_.cse, b), b.word,
                             block_point_count(b), i, versions_[i]});
    }

    void rearm() {
        heap_ = {};
        for (size_t i = 0; i < fam_.blocks.size(); ++i) push_if_poppable(i);
    }

    void apply_pop(size_t i) {
        Rational old_err = block_error(fam_.cse, fam_.blocks[i]);
        ++versions_[i];
        Payload payload = fam_.blocks[i].payload;
        if (payload == Payload::nu_optimal) {
            fam_.blocks[i].nu_size += 1;
        } else if (payload == Payload::p_center) {
            fam_.blocks[i].payload = Payload::p_pair;
        } else {
            // split: nu singleton on C_w plus the two child centers
            Word w = fam_.blocks[i].word;
            fam_.blocks[i] = Block{w, Payload::nu_optimal, 1};
            Word w1 = w, w2 = w;
            w1.push_back(1);
            w2.push_back(2);
            fam_.blocks.push_back(Block{std::move(w1), Payload::p_center, 0});
            fam_.blocks.push_back(Block{std::move(w2), Payload::p_center, 0});
            versions_.push_back(0);
            versions_.push_back(0);
            error_ += block_error(fam_.cse, fam_.blocks[fam_.blocks.size() - 2]);
            error_ += block_error(fam_.cse, fam_.blocks.back());
            push_if_poppable(fam_.blocks.size() - 2);
            push_if_poppable(fam_.blocks.size() - 1);
        }
        error_ += block_error(fam_.cse, fam_.blocks[i]) - old_err;
        count_ += 1;
        push_if_poppable(i);
    }

    BlockFamily fam_;
    int t_;
    long long count_ = 0;
    Rational error_;
    std::vector<uint64_t> versions_;
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapWorse> heap_;
};

}  // namespace detail

// Refine `fam` (a family whose count sits in [F(transition), F(transition+1)))
// until it has `target` points. `on_pop`, when given, observes (count, error)
// after every single added point.
inline BlockFamily greedy_refine(
    BlockFamily fam, int transition, long long target,
    const std::function<void(long long, const Rational&)>& on_pop = nullptr) {
    if (target < fam.total_count())
        throw std::invalid_argument("greedy_refine: target below family size");
    detail::GreedyState st(std::move(fam), transition);
    while (st.count() < target) {
        st.advance_boundary_if_needed();
        if (!st.pop())
            throw std::logic_error("greedy_refine: no poppable block");
        if (on_pop) on_pop(st.count(), st.error());
    }
    return st.take_family();
}

// Convenience: refine starting from alpha_F(c, n).
inline BlockFamily greedy_refine_from(Case c, int n, long long target,
                                      const std::function<void(long long, const Rational&)>&
                                          on_pop = nullptr) {
    return greedy_refine(alpha_F(c, n), n, target, on_pop);
}

// ---------------------------------------------------------------------------
// Candidates for arbitrary n

struct Candidate {
    BlockFamily family;
    Rational error;
    std::string tag;  // "paper-optimal" or "candidate upper bound"
};

namespace detail {

// Start of the greedy ladder at or below n: the largest structured family
// with count <= n, falling back to the single root center {E(P)} (count 1).
inline std::pair<BlockFamily, int> ladder_start(Case c, long long n) {
    int best = -1;
    for (int k = 0;; ++k) {
        if (seq(c, k).F > n) break;
        best = k;
    }
    if (best >= 0) return {alpha_F(c, best), best};
    // below the smallest structured family: the single root center {E(P)}
    BlockFamily fam{c, {Block{{}, Payload::p_center, 0}}};
    return {std::move(fam), -1};
}

inline bool certified_count(Case c, long long n) {
    // the structured family counts
    for (int k = 0;; ++k) {
        Int f = seq(c, k).F;
        if (f == n) return true;
        if (f > n) break;
    }
    if (c == Case::uniform) {
        // small n certified individually (n = 5 is only bounded, not solved)
        if (n == 1 || n == 2 || n == 4 || n == 6 || n == 7) return true;
        // the mid-transition counts F(k) + 2^a(k)
        for (int k = 1;; ++k) {
            Seq s = seq(c, k);
            Int mid = s.F + ipow(2, unsigned(s.a));
            if (mid == n) return true;
            if (mid > n) break;
        }
        return false;
    }
    if (n == 2 || n == 3) return true;  // n = 1 is the k = 0 family
    // the corrected counts 2^k (6 + 2^-30 (2^13 + 1)) - 2k - 6, k >= 40
    for (int k = 40;; ++k) {
        Int cnt = 6 * ipow(2, unsigned(k)) + ipow(2, unsigned(k - 30)) * 8193 -
                  2 * k - 6;
        if (cnt == n) return true;
        if (cnt > n) break;
    }
    return false;
}

}  // namespace detail

inline Candidate candidate_optimal(Case c, long long n) {
    if (n < 1) throw std::domain_error("candidate_optimal: n >= 1");
    auto [start, transition] = detail::ladder_start(c, n);
    BlockFamily fam = greedy_refine(std::move(start), transition, n);
    Rational err = fam.total_error();
    return {std::move(fam), std::move(err),
            detail::certified_count(c, n) ? "paper-optimal"
                                          : "candidate upper bound"};
}

// ---------------------------------------------------------------------------
// The mid-transition subsequence with its displayed closed form

struct Intermediate {
    Int count;
    Rational error;
};

inline Intermediate intermediate_sequence(Case c, int n) {
    if (c == Case::uniform) {
        if (n < 1)
            throw std::domain_error(
                "DomainTooSmall: uniform intermediate counts need n >= 1");
        Int count = 3 * ipow(4, unsigned(n)) / 2 + ipow(2, unsigned(n + 1));
        Rational err = Rational(19, 4300) * rpow(Rational(1, 16), n) -
                       Rational(3473, 941700) * rpow(Rational(2, 75), n);
        return {std::move(count), std::move(err)};
    }
    if (n < 40)
        throw std::domain_error(
            "DomainTooSmall: the discrete ordering chains are established "
            "only for n >= 40");
    Int count = 6 * ipow(2, unsigned(n)) + ipow(2, unsigned(n - 30)) * 8193 -
                2 * n - 6;
    Rational q = Rational(75, 128);
    Rational err = v_F_closed(c, n) -
                   Rational(128, 3975) * rpow(Rational(2, 75), n) *
                       (rpow(q, 31) - rpow(q, n + 1)) -
                   Rational(1024, 35775) * rpow(Rational(2, 75), n) *
                       (rpow(q, 18) - rpow(q, 31)) -
                   Rational(450241, 5323500) * rpow(Rational(2, 75), n);
    return {std::move(count), std::move(err)};
}

// ---------------------------------------------------------------------------
// The discrete ordering chains (exact comparisons at a given level n).
// Keys are block total errors; the two mixed upgrade states are keyed by
// their child-center constituent.
inline bool discrete_order_chains_hold(int n) {
    Case c = Case::discrete;
    auto S = [&](int l, int m) -> Rational {  // nu-block at level n-l holding m points
        return nu_optimal_error(c, m) / 3 * rpow(Rational(1, 75), n - l);
    };
    auto S0 = [&](int l) -> Rational { return S(l, 2 * l); };
    auto S2 = [&](int l) -> Rational { return S(l, 2 * l + 1); };
    auto S22 = [&](int l) -> Rational { return S(l, 2 * l + 2); };
    Rational center = p_variance(c) * rpow(Rational(1, 75), n);
    Rational pair = p_two_means_error(c) * rpow(Rational(1, 75), n);
    Rational child = p_variance(c) * rpow(Rational(1, 75), n + 1);
    for (int k = 14; k < n - 2; ++k) {
        if (!(S0(n - k) > S2(n - k + 13) && S2(n - k + 13) > S22(n - k + 26) &&
              S22(n - k + 26) > S0(n - k - 1)))
            return false;
    }
    if (!(S0(14) > S2(27) && S2(27) > S22(40) && S22(40) > center &&
          center > S0(13)))
        return false;
    if (!(S0(5) > S2(18) && S2(18) > S22(31) && S22(31) > pair &&
          pair > S0(4)))
        return false;
    return S22(13) > child && child > S22(12);
}

}  // namespace condquant
