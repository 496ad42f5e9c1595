#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tcr/extended_delta.hpp"
#include "tcr/matrix.hpp"

namespace tcr {

struct Channel {
    std::string from;
    std::string to;
    ExtendedDelta bound; // positive integer or POS_INF

    friend bool operator==(const Channel&, const Channel&) = default;
};

struct ExternalInput {
    std::string id;
    std::string observer;

    friend bool operator==(const ExternalInput&, const ExternalInput&) = default;
};

struct Context {
    std::vector<std::string> agents;
    std::vector<Channel> channels;
    std::vector<ExternalInput> inputs;
    bool shared_clock = true;

    std::optional<std::size_t> agent_index(const std::string& id) const;
    std::optional<std::size_t> input_index(const std::string& id) const;

    friend bool operator==(const Context&, const Context&) = default;
};

struct Diagnostic {
    enum class Kind {
        NonPositiveBound,
        UnknownObserver,
        UnknownAgent,
        SelfChannel,
        DuplicateChannel,
        DuplicateAgent,
        DuplicateInput,
    };
    Kind kind;
    std::string message;
};

std::string to_string(Diagnostic::Kind kind);

std::vector<Diagnostic> validate_context(const Context& ctx);

struct CommDistance {
    std::vector<std::string> agents;
    SquareMatrix<ExtendedDelta> dist;

    ExtendedDelta operator()(std::size_t i, std::size_t j) const { return dist(i, j); }
};

// Shortest delivery-guarantee distances over finite-bound channels.
// Throws InvalidContext.
CommDistance comm_distance(const Context& ctx);

// Index-based view of a validated context, shared by the simulator and the
// analyses. Distances use -1 for "no finite-bound path".
class ContextIndex {
public:
    struct Link {
        std::size_t from;
        std::size_t to;
        int bound; // -1 when unbounded
    };

    explicit ContextIndex(Context ctx);

    const Context& context() const { return ctx_; }
    std::size_t agent_count() const { return ctx_.agents.size(); }
    std::size_t input_count() const { return ctx_.inputs.size(); }
    const std::vector<Link>& links() const { return links_; }
    const std::vector<std::size_t>& incoming(std::size_t agent) const { return incoming_[agent]; }
    std::size_t observer(std::size_t input) const { return observers_[input]; }
    const std::string& agent_id(std::size_t a) const { return ctx_.agents[a]; }

    std::size_t agent(const std::string& id) const;
    std::size_t input(const std::string& id) const;
    std::optional<std::size_t> link(std::size_t from, std::size_t to) const;

    // -1 when no finite-bound path exists.
    int dist(std::size_t from, std::size_t to) const { return dist_(from, to); }
    // Reachability over all channels, including unbounded ones. Reflexive.
    bool reaches(std::size_t from, std::size_t to) const { return reach_(from, to) != 0; }

private:
    Context ctx_;
    std::vector<Link> links_;
    std::vector<std::vector<std::size_t>> incoming_;
    std::vector<std::size_t> observers_;
    SquareMatrix<int> dist_;
    SquareMatrix<char> reach_;
};

using ContextRef = std::shared_ptr<const ContextIndex>;

ContextRef index_context(const Context& ctx);

} // namespace tcr
