#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mfgp/rng.hpp"

namespace mfgp {

/// Binary function symbols. Division is protected: x/0 evaluates to 1.
enum class Op : std::uint8_t { add, sub, mul, div };

char op_symbol(Op op);

/// The configured set of binary functions available to tree construction.
/// Defaults to {+, -}; * and / can be enabled explicitly.
struct FunctionSet {
    std::vector<Op> ops{Op::add, Op::sub};

    void validate() const; // non-empty, unique symbols
    bool contains(Op op) const;

    /// Parses a comma-separated symbol list such as "+,-" or "+,-,*,/".
    static FunctionSet from_string(const std::string& text);
    std::string to_string() const;
};

/// One node of a gene tree in prefix order. Leaves carry a 0-based feature
/// index; internal nodes carry a binary op and are followed by their two
/// operand subtrees.
struct ExprNode {
    static constexpr std::int32_t kInternal = -1;

    std::int32_t var = kInternal;
    Op op = Op::add;

    bool is_leaf() const { return var >= 0; }

    static ExprNode leaf(std::int32_t feature_index) {
        ExprNode n;
        n.var = feature_index;
        return n;
    }
    static ExprNode internal(Op o) {
        ExprNode n;
        n.op = o;
        return n;
    }

    bool operator==(const ExprNode& other) const {
        return var == other.var && (is_leaf() || op == other.op);
    }
};

/// A single expression tree over named input features (one "gene" of a
/// multigene model), stored flat in prefix order. A subtree is a contiguous
/// slice, which keeps subtree crossover and mutation simple splices.
struct GeneTree {
    std::vector<ExprNode> nodes;

    bool operator==(const GeneTree& other) const { return nodes == other.nodes; }

    std::size_t node_count() const { return nodes.size(); }

    /// Index one past the end of the subtree rooted at node i.
    std::size_t subtree_end(std::size_t i) const;

    /// Depth of the node at index i, root = 1.
    std::size_t node_depth(std::size_t i) const;

    /// Largest feature index referenced, or -1 for an impossible empty tree.
    std::int32_t max_var_index() const;

    /// True if every referenced feature index is one of `allowed` (0-based).
    bool uses_only(std::span<const std::int32_t> allowed) const;
};

struct TreeMetrics {
    std::size_t node_count = 0;
    std::size_t depth = 0;
    /// Sum over every node of the size of the subtree rooted there.
    std::size_t expressional_complexity = 0;
};

TreeMetrics tree_metrics(const GeneTree& tree);
std::size_t tree_depth(const GeneTree& tree);

/// Parses the prefix s-expression grammar
///   tree := var | "(" op ws tree ws tree ")"
///   op   := "+" | "-" | "*" | "/"
///   var  := "x" digits | feature-name
/// Tokens of the form x<digits> are always positional (1-based), even when a
/// feature happens to carry such a name; other tokens are looked up in the
/// schema. Case-sensitive.
GeneTree parse_sexpr(const std::string& text, std::span<const std::string> schema);

/// Canonical prefix form, always positional: parse(print(t)) == t.
std::string print_sexpr(const GeneTree& tree);

/// Display form using schema names where they round-trip (non-empty, free of
/// whitespace and parens, not shaped like x<digits>); positional otherwise.
std::string print_sexpr_named(const GeneTree& tree,
                              std::span<const std::string> schema);

/// Evaluates the tree for every sample. `columns` holds one pointer per
/// feature in schema order, each addressing n_samples values.
void eval_tree(const GeneTree& tree, std::span<const double* const> columns,
               std::size_t n_samples, double* out);
std::vector<double> eval_tree(const GeneTree& tree,
                              std::span<const double* const> columns,
                              std::size_t n_samples);

/// Evaluates the tree for a single sample (row holds one value per feature).
double eval_tree_row(const GeneTree& tree, std::span<const double> row);

enum class GrowMethod { grow, full };

/// Builds a random tree of depth <= max_depth over n_features variables.
/// `full` places internal nodes everywhere above max_depth, so every leaf sits
/// at exactly max_depth; `grow` chooses leaf or internal evenly at each site.
/// All randomness comes from `rng`.
GeneTree random_tree(Rng& rng, std::size_t n_features, const FunctionSet& fs,
                     std::size_t max_depth, GrowMethod method);

} // namespace mfgp
