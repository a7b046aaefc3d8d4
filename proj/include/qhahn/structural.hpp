// structural.hpp — memoized structural sequences R(q^n), D(q^n)
//
// These sequences carry the Jacobi data of a reduced Hamiltonian: R(q^{n+1})
// squares to the off-diagonal entries, D(q^n) is the diagonal. They come
// from Pearson data, from a multiboson reduction, or are supplied directly.
#pragma once

#include <functional>
#include <mutex>
#include <vector>

namespace qhahn {

enum class SeqSource { from_pearson, from_multiboson, explicit_seq };

// Lazy memoized evaluation; single writer under a lock, published values
// are immutable afterwards, so concurrent readers are safe.
class StructuralSeq {
public:
    StructuralSeq(std::function<double(int)> r_eval, std::function<double(int)> d_eval,
                  SeqSource source)
        : r_eval_(std::move(r_eval)), d_eval_(std::move(d_eval)), source_(source) {}

    StructuralSeq(const StructuralSeq& other) : source_(other.source_) {
        std::scoped_lock lock(other.mutex_);
        r_eval_ = other.r_eval_;
        d_eval_ = other.d_eval_;
        r_memo_ = other.r_memo_;
        d_memo_ = other.d_memo_;
    }

    // R evaluated at q^n.
    double R(int n) const { return fetch(r_memo_, r_eval_, n); }
    // D evaluated at q^n.
    double D(int n) const { return fetch(d_memo_, d_eval_, n); }

    SeqSource source() const { return source_; }

private:
    double fetch(std::vector<double>& memo, const std::function<double(int)>& eval, int n) const {
        std::scoped_lock lock(mutex_);
        while (static_cast<int>(memo.size()) <= n)
            memo.push_back(eval(static_cast<int>(memo.size())));
        return memo[static_cast<std::size_t>(n)];
    }

    mutable std::mutex mutex_;
    std::function<double(int)> r_eval_, d_eval_;
    mutable std::vector<double> r_memo_, d_memo_;
    SeqSource source_;
};

} // namespace qhahn
