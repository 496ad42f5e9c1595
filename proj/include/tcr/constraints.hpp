#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tcr/extended_delta.hpp"
#include "tcr/matrix.hpp"

namespace tcr {

// Agents plus an upper bound delta(i,j) on t(j) - t(i) for every ordered pair
// of distinct agents. Unset pairs are POS_INF; the diagonal is unused.
struct ImplementationSpec {
    std::vector<std::string> agents;
    SquareMatrix<ExtendedDelta> delta;

    ImplementationSpec() = default;
    explicit ImplementationSpec(std::vector<std::string> ids);

    std::size_t size() const { return agents.size(); }
    std::optional<std::size_t> index_of(const std::string& id) const;

    ExtendedDelta at(std::size_t i, std::size_t j) const { return delta(i, j); }
    void set(std::size_t i, std::size_t j, ExtendedDelta v) { delta(i, j) = v; }
    void set(const std::string& i, const std::string& j, ExtendedDelta v);

    friend bool operator==(const ImplementationSpec&, const ImplementationSpec&) = default;
};

struct ConstraintEdge {
    std::size_t from;
    std::size_t to;
    ExtendedDelta weight; // finite or NEG_INF
};

struct ConstraintGraph {
    std::vector<std::string> vertices;
    std::vector<ConstraintEdge> edges;
};

struct CanonicalForm {
    std::vector<std::string> agents;
    SquareMatrix<ExtendedDelta> dhat; // diagonal included

    ImplementationSpec as_spec() const;
    friend bool operator==(const CanonicalForm&, const CanonicalForm&) = default;
};

struct TimeAssignment {
    std::vector<std::string> agents;
    std::vector<std::int64_t> t;

    friend bool operator==(const TimeAssignment&, const TimeAssignment&) = default;
};

ConstraintGraph constraint_graph(const ImplementationSpec& spec);

CanonicalForm canonical_form(const ImplementationSpec& spec);

bool is_implementable(const ImplementationSpec& spec);

// t(i) = -min_j dhat(i,j). Throws NotImplementable.
TimeAssignment minimal_implementation(const ImplementationSpec& spec);

// Throws AgentMismatch when t is not over the agents of spec.
bool verify_implementation(const ImplementationSpec& spec, const TimeAssignment& t);

// An implementation with t(j) - t(i) = dhat(i,j) when that is finite, or
// t(j) - t(i) >= k when dhat(i,j) = POS_INF. Throws NotImplementable.
TimeAssignment extremal_implementation(const ImplementationSpec& spec, std::size_t i,
                                       std::size_t j, std::int64_t k);

// Row minimum of dhat at i, diagonal included.
ExtendedDelta row_min(const CanonicalForm& cf, std::size_t i);

std::string format_matrix(const std::vector<std::string>& agents,
                          const SquareMatrix<ExtendedDelta>& m);

} // namespace tcr
