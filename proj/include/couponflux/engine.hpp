#pragma once

// Batch hitting-time engine for the deep rare-event runs (careless and
// combined at survival 1/2, where a single suite needs 10^11+ steps). Sample
// i always consumes counter stream (seed, i) with the exact per-step draw
// contract documented in simulate_careless_one and simulate_combined_one, so
// the vectorized path, the scalar path, and any thread fan-out produce
// byte-identical sample arrays.
//
// The AVX-512 path runs 16 independent xoshiro256++ streams (two 8-lane
// vector groups) and retires finished lanes onto fresh sample ids. Completion
// is checked every step (the first step with a full collection must be
// recorded exactly); the budget check runs on a countdown so the common case
// costs one decrement per step.

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

#include "careless.hpp"
#include "clumsy.hpp"
#include "combined.hpp"
#include "errors.hpp"
#include "rng.hpp"

#if defined(__AVX512F__)
#include <immintrin.h>
#endif

namespace couponflux {

struct BatchResult {
    std::vector<std::uint64_t> samples;  // censored entries hold the budget value
    std::vector<std::uint8_t> censored;
    std::size_t censored_count = 0;

    void tally() {
        censored_count = 0;
        for (auto c : censored) censored_count += c;
    }
};

namespace detail {

inline std::uint64_t effective_budget(std::uint64_t budget) {
    return budget == 0 ? ~0ull : budget;
}

template <typename OneSample>
inline void scalar_range(BatchResult& out, std::uint64_t seed, std::size_t begin,
                         std::size_t end, std::uint64_t budget, OneSample&& one) {
    for (std::size_t i = begin; i < end; ++i) {
        Xoshiro256pp rng = stream_rng(seed, i);
        try {
            out.samples[i] = one(rng, budget);
        } catch (const BudgetExceeded&) {
            out.samples[i] = effective_budget(budget);
            out.censored[i] = 1;
        }
    }
}

#if defined(__AVX512F__)

// Lane bookkeeping shared by the vectorized models. A lane whose id supply is
// exhausted keeps running on a dummy stream with its events ignored; that
// costs a rare spurious burst exit and nothing else.
struct LaneBlock {
    static constexpr std::size_t kLanes = 16;
    static constexpr std::uint64_t kIdle = ~0ull;

    alignas(64) std::uint64_t s[4][kLanes];
    alignas(64) std::uint64_t state[kLanes];
    alignas(64) std::uint64_t steps[kLanes];
    std::uint64_t ids[kLanes];
    std::size_t next_id = 0, end_id = 0;
    std::uint64_t seed = 0;
    std::size_t active = 0;

    void seed_lane(std::size_t lane, std::uint64_t sample_id) {
        std::uint64_t x = stream_seed(seed, sample_id);
        for (int k = 0; k < 4; ++k) s[k][lane] = splitmix64(x);
        state[lane] = 0;
        steps[lane] = 0;
        ids[lane] = sample_id;
    }

    void init(std::uint64_t seed_, std::size_t begin, std::size_t end) {
        seed = seed_;
        next_id = begin;
        end_id = end;
        for (std::size_t l = 0; l < kLanes; ++l) {
            if (next_id < end_id) {
                seed_lane(l, next_id++);
                ++active;
            } else {
                seed_lane(l, 0);
                ids[l] = kIdle;
            }
        }
    }

    void retire(BatchResult& out, std::size_t lane, bool completed, std::uint64_t budget) {
        if (ids[lane] != kIdle) {
            std::uint64_t id = ids[lane];
            out.samples[id] = completed ? steps[lane] : budget;
            out.censored[id] = completed ? 0 : 1;
            --active;
        }
        if (next_id < end_id) {
            seed_lane(lane, next_id++);
            ++active;
        } else {
            seed_lane(lane, 0);
            ids[lane] = kIdle;
        }
    }

    std::uint64_t max_steps() const {
        std::uint64_t m = 0;
        for (std::size_t l = 0; l < kLanes; ++l) m = std::max(m, steps[l]);
        return m;
    }
};

struct VecStream {
    __m512i s0, s1, s2, s3;

    __m512i next() {
        __m512i r = _mm512_add_epi64(
            _mm512_rolv_epi64(_mm512_add_epi64(s0, s3), _mm512_set1_epi64(23)), s0);
        __m512i t = _mm512_slli_epi64(s1, 17);
        s2 = _mm512_xor_si512(s2, s0);
        s3 = _mm512_xor_si512(s3, s1);
        s1 = _mm512_xor_si512(s1, s2);
        s0 = _mm512_xor_si512(s0, s3);
        s2 = _mm512_xor_si512(s2, t);
        s3 = _mm512_rolv_epi64(s3, _mm512_set1_epi64(45));
        return r;
    }
};

// Shared burst driver. StepFn advances both vector groups one model step and
// returns true when any lane completed (leaving done_a/done_b filled).
template <typename StepFn>
inline void vector_batch_range(BatchResult& out, std::uint64_t seed, std::size_t begin,
                               std::size_t end, std::uint64_t budget, int n, StepFn&& step_pair) {
    const std::uint64_t bud = effective_budget(budget);
    LaneBlock lanes;
    lanes.init(seed, begin, end);
    const std::uint64_t full = n == 64 ? ~0ull : (1ull << n) - 1;
    const __m512i vfull = _mm512_set1_epi64(static_cast<long long>(full));
    const __m512i vone = _mm512_set1_epi64(1);

    while (lanes.active > 0) {
        VecStream a{_mm512_load_si512(&lanes.s[0][0]), _mm512_load_si512(&lanes.s[1][0]),
                    _mm512_load_si512(&lanes.s[2][0]), _mm512_load_si512(&lanes.s[3][0])};
        VecStream b{_mm512_load_si512(&lanes.s[0][8]), _mm512_load_si512(&lanes.s[1][8]),
                    _mm512_load_si512(&lanes.s[2][8]), _mm512_load_si512(&lanes.s[3][8])};
        __m512i Sa = _mm512_load_si512(&lanes.state[0]);
        __m512i Sb = _mm512_load_si512(&lanes.state[8]);
        __m512i Ta = _mm512_load_si512(&lanes.steps[0]);
        __m512i Tb = _mm512_load_si512(&lanes.steps[8]);

        // Steps until the longest-running lane can hit the budget; within the
        // countdown no budget check is needed.
        std::uint64_t countdown = bud - std::min(bud, lanes.max_steps());
        if (countdown == 0) countdown = 1;

        __mmask8 done_a = 0, done_b = 0;
        bool budget_scan = false;
        for (;;) {
            step_pair(a, b, Sa, Sb);
            Ta = _mm512_add_epi64(Ta, vone);
            Tb = _mm512_add_epi64(Tb, vone);
            done_a = _mm512_cmpeq_epi64_mask(Sa, vfull);
            done_b = _mm512_cmpeq_epi64_mask(Sb, vfull);
            if (done_a | done_b) break;
            if (--countdown == 0) {
                budget_scan = true;
                break;
            }
        }

        _mm512_store_si512(&lanes.s[0][0], a.s0);
        _mm512_store_si512(&lanes.s[1][0], a.s1);
        _mm512_store_si512(&lanes.s[2][0], a.s2);
        _mm512_store_si512(&lanes.s[3][0], a.s3);
        _mm512_store_si512(&lanes.s[0][8], b.s0);
        _mm512_store_si512(&lanes.s[1][8], b.s1);
        _mm512_store_si512(&lanes.s[2][8], b.s2);
        _mm512_store_si512(&lanes.s[3][8], b.s3);
        _mm512_store_si512(&lanes.state[0], Sa);
        _mm512_store_si512(&lanes.state[8], Sb);
        _mm512_store_si512(&lanes.steps[0], Ta);
        _mm512_store_si512(&lanes.steps[8], Tb);

        std::uint32_t done = static_cast<std::uint32_t>(done_a) |
                             (static_cast<std::uint32_t>(done_b) << 8);
        for (std::size_t l = 0; l < LaneBlock::kLanes; ++l)
            if (done & (1u << l)) lanes.retire(out, l, true, bud);
        if (budget_scan) {
            for (std::size_t l = 0; l < LaneBlock::kLanes; ++l)
                if (!(done & (1u << l)) && lanes.steps[l] >= bud)
                    lanes.retire(out, l, false, bud);
        }
    }
}

inline void careless_avx512_range(BatchResult& out, const CarelessParams& par,
                                  std::uint64_t seed, std::size_t begin, std::size_t end,
                                  std::uint64_t budget) {
    const __m512i vn = _mm512_set1_epi64(par.n);
    const __m512i vone = _mm512_set1_epi64(1);
    const std::uint64_t full = (1ull << par.n) - 1;
    const __m512i vfull = _mm512_set1_epi64(static_cast<long long>(full));
    vector_batch_range(out, seed, begin, end, budget, par.n,
                       [&](VecStream& a, VecStream& b, __m512i& Sa, __m512i& Sb) {
                           __m512i ra = a.next();
                           __m512i rb = b.next();
                           __m512i ja = _mm512_srli_epi64(
                               _mm512_mul_epu32(_mm512_srli_epi64(ra, 32), vn), 32);
                           __m512i jb = _mm512_srli_epi64(
                               _mm512_mul_epu32(_mm512_srli_epi64(rb, 32), vn), 32);
                           Sa = _mm512_and_si512(
                               _mm512_or_si512(Sa, _mm512_sllv_epi64(vone, ja)),
                               _mm512_and_si512(ra, vfull));
                           Sb = _mm512_and_si512(
                               _mm512_or_si512(Sb, _mm512_sllv_epi64(vone, jb)),
                               _mm512_and_si512(rb, vfull));
                       });
}

inline void combined_avx512_range(BatchResult& out, const CombinedParams& par,
                                  std::uint64_t seed, std::size_t begin, std::size_t end,
                                  std::uint64_t budget) {
    const __m512i vn = _mm512_set1_epi64(par.n);
    const __m512i vone = _mm512_set1_epi64(1);
    const std::uint64_t full = (1ull << par.n) - 1;
    const __m512i vfull = _mm512_set1_epi64(static_cast<long long>(full));
    double qs = par.Q() * par.S() * 4294967296.0;
    const std::uint64_t thr =
        qs < 4294967295.0 ? static_cast<std::uint64_t>(qs + 0.5) : 4294967295ull;
    const __m512i vthr = _mm512_set1_epi64(static_cast<long long>(thr));
    vector_batch_range(
        out, seed, begin, end, budget, par.n,
        [&](VecStream& a, VecStream& b, __m512i& Sa, __m512i& Sb) {
            __m512i r1a = a.next();
            __m512i r1b = b.next();
            __m512i r2a = a.next();
            __m512i r2b = b.next();
            __m512i ja = _mm512_srli_epi64(_mm512_mul_epu32(_mm512_srli_epi64(r1a, 32), vn), 32);
            __m512i jb = _mm512_srli_epi64(_mm512_mul_epu32(_mm512_srli_epi64(r1b, 32), vn), 32);
            __m512i bita = _mm512_sllv_epi64(vone, ja);
            __m512i bitb = _mm512_sllv_epi64(vone, jb);
            __mmask8 coina =
                _mm512_cmp_epu64_mask(_mm512_srli_epi64(r2a, 32), vthr, _MM_CMPINT_LT);
            __mmask8 coinb =
                _mm512_cmp_epu64_mask(_mm512_srli_epi64(r2b, 32), vthr, _MM_CMPINT_LT);
            Sa = _mm512_or_si512(
                _mm512_and_si512(_mm512_andnot_si512(bita, Sa), _mm512_and_si512(r1a, vfull)),
                _mm512_maskz_mov_epi64(coina, bita));
            Sb = _mm512_or_si512(
                _mm512_and_si512(_mm512_andnot_si512(bitb, Sb), _mm512_and_si512(r1b, vfull)),
                _mm512_maskz_mov_epi64(coinb, bitb));
        });
}

#endif  // __AVX512F__

template <typename RangeFn>
inline BatchResult run_threaded(std::size_t count, int threads, RangeFn&& range) {
    BatchResult out;
    out.samples.assign(count, 0);
    out.censored.assign(count, 0);
    if (threads < 1) threads = 1;
    threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads),
                                                     count == 0 ? 1 : count));
    if (threads == 1) {
        range(out, static_cast<std::size_t>(0), count);
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (count + static_cast<std::size_t>(threads) - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            std::size_t b = static_cast<std::size_t>(t) * chunk;
            std::size_t e = std::min(count, b + chunk);
            if (b >= e) break;
            pool.emplace_back([&, b, e] { range(out, b, e); });
        }
        for (auto& th : pool) th.join();
    }
    out.tally();
    return out;
}

}  // namespace detail

// Batch samplers. The per-sample stream contract makes the output independent
// of the execution strategy chosen here.

inline BatchResult careless_hitting_batch(const CarelessParams& par, std::uint64_t seed,
                                          std::size_t count, std::uint64_t budget = 0,
                                          int threads = 1) {
    bool fast = par.q == 0.5 && par.n <= 32;
    return detail::run_threaded(count, threads, [&](BatchResult& out, std::size_t b, std::size_t e) {
#if defined(__AVX512F__)
        if (fast && par.n <= 32) {
            detail::careless_avx512_range(out, par, seed, b, e, budget);
            return;
        }
#else
        (void)fast;
#endif
        detail::scalar_range(out, seed, b, e, budget, [&](Xoshiro256pp& rng, std::uint64_t bud) {
            return simulate_careless_one(par, rng, bud);
        });
    });
}

inline BatchResult combined_hitting_batch(const CombinedParams& par, std::uint64_t seed,
                                          std::size_t count, std::uint64_t budget = 0,
                                          int threads = 1) {
    bool fast = par.S() == 0.5 && par.n <= 32;
    return detail::run_threaded(count, threads, [&](BatchResult& out, std::size_t b, std::size_t e) {
#if defined(__AVX512F__)
        if (fast && par.n <= 32) {
            detail::combined_avx512_range(out, par, seed, b, e, budget);
            return;
        }
#else
        (void)fast;
#endif
        detail::scalar_range(out, seed, b, e, budget, [&](Xoshiro256pp& rng, std::uint64_t bud) {
            return simulate_combined_one(par, rng, bud);
        });
    });
}

inline BatchResult clumsy_hitting_batch(const ClumsyParams& par, std::uint64_t seed,
                                        std::size_t count, int threads = 1) {
    return detail::run_threaded(count, threads, [&](BatchResult& out, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            Xoshiro256pp rng = stream_rng(seed, i);
            out.samples[i] = simulate_clumsy_one(par, rng);
        }
    });
}

}  // namespace couponflux
