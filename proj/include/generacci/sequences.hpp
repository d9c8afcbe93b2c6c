#pragma once

#include "generacci/types.hpp"

#include <memory>
#include <vector>

namespace generacci {

struct GeneracciParams {
    int s;
    int b;

    GeneracciParams(int s_, int b_);

    // Number of leading terms that the recurrence cannot produce.
    std::size_t seed_length() const { return static_cast<std::size_t>((s + 1) * b + 1); }

    friend bool operator==(const GeneracciParams&, const GeneracciParams&) = default;
};

// Immutable 1-indexed term table; copies share storage.
class TermTable {
public:
    TermTable() : terms_(std::make_shared<const std::vector<BigInt>>()) {}
    explicit TermTable(std::vector<BigInt> terms)
        : terms_(std::make_shared<const std::vector<BigInt>>(std::move(terms))) {}

    std::size_t size() const { return terms_->size(); }
    const BigInt& operator[](std::size_t n) const { return (*terms_)[n - 1]; }
    const BigInt& term(std::size_t n) const;
    const BigInt& last() const { return terms_->back(); }
    const std::vector<BigInt>& terms() const { return *terms_; }

    // Largest index n with term(n) <= m, or 0 if m < term(1).
    std::size_t largest_at_most(const BigInt& m) const;

private:
    std::shared_ptr<const std::vector<BigInt>> terms_;
};

class GeneracciTable : public TermTable {
public:
    GeneracciTable(GeneracciParams p, std::vector<BigInt> terms)
        : TermTable(std::move(terms)), params_(p) {}
    const GeneracciParams& params() const { return params_; }

    // Number of complete bins held.
    std::size_t full_bins() const { return size() / static_cast<std::size_t>(params_.b); }

    // a_{rb+1}: legal subsets drawn from the first r bins, empty one included.
    // r <= 0 yields 1.
    const BigInt& bin_start(long r) const;

private:
    GeneracciParams params_;
};

class QuiltTable : public TermTable {
public:
    using TermTable::TermTable;
};

GeneracciTable generacci_by_definition(GeneracciParams p, std::size_t count);
GeneracciTable generacci_by_recurrence(GeneracciParams p, std::size_t count);

QuiltTable quilt_by_definition(std::size_t count);
QuiltTable quilt_terms(std::size_t count);

std::size_t bin_of(GeneracciParams p, std::size_t index);

}  // namespace generacci
