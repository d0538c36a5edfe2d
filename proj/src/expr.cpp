#include "mfgp/expr.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cctype>
#include <charconv>

#include "mfgp/errors.hpp"

namespace mfgp {

char op_symbol(Op op) {
    switch (op) {
    case Op::add: return '+';
    case Op::sub: return '-';
    case Op::mul: return '*';
    case Op::div: return '/';
    }
    return '?';
}

void FunctionSet::validate() const {
    if (ops.empty())
        throw ConfigError("function set must not be empty");
    for (std::size_t i = 0; i < ops.size(); ++i)
        for (std::size_t j = i + 1; j < ops.size(); ++j)
            if (ops[i] == ops[j])
                throw ConfigError(std::string("duplicate function symbol '") +
                                  op_symbol(ops[i]) + "'");
}

bool FunctionSet::contains(Op op) const {
    return std::find(ops.begin(), ops.end(), op) != ops.end();
}

FunctionSet FunctionSet::from_string(const std::string& text) {
    FunctionSet fs;
    fs.ops.clear();
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        std::string item = text.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start);
        // tolerate surrounding spaces
        while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front())))
            item.erase(item.begin());
        while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back())))
            item.pop_back();
        if (item.size() != 1)
            throw ConfigError("bad function symbol '" + item + "' in function set '" +
                              text + "'");
        switch (item[0]) {
        case '+': fs.ops.push_back(Op::add); break;
        case '-': fs.ops.push_back(Op::sub); break;
        case '*': fs.ops.push_back(Op::mul); break;
        case '/': fs.ops.push_back(Op::div); break;
        default:
            throw ConfigError("unknown function symbol '" + item + "'");
        }
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    fs.validate();
    return fs;
}

std::string FunctionSet::to_string() const {
    std::string out;
    for (Op op : ops) {
        if (!out.empty())
            out += ',';
        out += op_symbol(op);
    }
    return out;
}

std::size_t GeneTree::subtree_end(std::size_t i) const {
    assert(i < nodes.size());
    std::size_t pending = 1;
    std::size_t j = i;
    while (pending > 0) {
        pending += nodes[j].is_leaf() ? 0 : 2;
        --pending;
        ++j;
    }
    return j;
}

std::size_t GeneTree::node_depth(std::size_t i) const {
    assert(i < nodes.size());
    // prefix scan tracking how many children remain open at each level
    std::vector<std::size_t> open; // children still expected per enclosing node
    for (std::size_t j = 0;; ++j) {
        if (j == i)
            return open.size() + 1;
        if (nodes[j].is_leaf()) {
            while (!open.empty() && --open.back() == 0)
                open.pop_back();
        } else {
            open.push_back(2);
        }
    }
}

std::int32_t GeneTree::max_var_index() const {
    std::int32_t m = -1;
    for (const ExprNode& n : nodes)
        if (n.is_leaf())
            m = std::max(m, n.var);
    return m;
}

bool GeneTree::uses_only(std::span<const std::int32_t> allowed) const {
    for (const ExprNode& n : nodes)
        if (n.is_leaf() &&
            std::find(allowed.begin(), allowed.end(), n.var) == allowed.end())
            return false;
    return true;
}

std::size_t tree_depth(const GeneTree& tree) {
    std::size_t best = 0;
    std::vector<std::size_t> open;
    for (const ExprNode& n : tree.nodes) {
        best = std::max(best, open.size() + 1);
        if (n.is_leaf()) {
            while (!open.empty() && --open.back() == 0)
                open.pop_back();
        } else {
            open.push_back(2);
        }
    }
    return best;
}

TreeMetrics tree_metrics(const GeneTree& tree) {
    TreeMetrics m;
    m.node_count = tree.node_count();
    m.depth = tree_depth(tree);
    // closed recursion: EC(v) = |subtree(v)| + sum EC(children);
    // on the flat form that is simply the sum of all subtree sizes
    for (std::size_t i = 0; i < tree.nodes.size(); ++i)
        m.expressional_complexity += tree.subtree_end(i) - i;
    return m;
}

namespace {

struct Token {
    enum Kind { lparen, rparen, symbol, end } kind;
    std::string text;
    std::size_t pos;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    Token next() {
        while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_])))
            ++i_;
        if (i_ >= text_.size())
            return {Token::end, "", text_.size()};
        std::size_t start = i_;
        char c = text_[i_];
        if (c == '(') {
            ++i_;
            return {Token::lparen, "(", start};
        }
        if (c == ')') {
            ++i_;
            return {Token::rparen, ")", start};
        }
        while (i_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[i_])) &&
               text_[i_] != '(' && text_[i_] != ')')
            ++i_;
        return {Token::symbol, text_.substr(start, i_ - start), start};
    }

private:
    const std::string& text_;
    std::size_t i_ = 0;
};

bool is_positional(const std::string& s, std::size_t& index_out) {
    if (s.size() < 2 || s[0] != 'x')
        return false;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i])))
            return false;
    std::size_t k = 0;
    auto [p, ec] = std::from_chars(s.data() + 1, s.data() + s.size(), k);
    if (ec != std::errc() || p != s.data() + s.size())
        return false;
    index_out = k;
    return true;
}

class Parser {
public:
    Parser(const std::string& text, std::span<const std::string> schema)
        : lexer_(text), schema_(schema) {
        advance();
    }

    GeneTree parse() {
        GeneTree tree;
        parse_expr(tree);
        if (cur_.kind != Token::end)
            throw ParseError("trailing input after expression", cur_.pos);
        return tree;
    }

private:
    void advance() { cur_ = lexer_.next(); }

    void parse_expr(GeneTree& tree) {
        if (cur_.kind == Token::symbol) {
            tree.nodes.push_back(ExprNode::leaf(resolve_var(cur_)));
            advance();
            return;
        }
        if (cur_.kind != Token::lparen)
            throw ParseError("expected expression, got '" + cur_.text + "'", cur_.pos);
        advance();
        if (cur_.kind != Token::symbol)
            throw ParseError("expected function symbol after '('", cur_.pos);
        Op op = resolve_op(cur_);
        std::string op_text = cur_.text;
        std::size_t op_pos = cur_.pos;
        advance();
        tree.nodes.push_back(ExprNode::internal(op));
        for (int arg = 0; arg < 2; ++arg) {
            if (cur_.kind == Token::rparen || cur_.kind == Token::end)
                throw ParseError("operator '" + op_text + "' expects 2 operands, got " +
                                     std::to_string(arg),
                                 op_pos);
            parse_expr(tree);
        }
        if (cur_.kind != Token::rparen)
            throw ParseError("operator '" + op_text +
                                 "' expects 2 operands; expected ')', got '" + cur_.text +
                                 "'",
                             cur_.pos);
        advance();
    }

    Op resolve_op(const Token& tok) {
        if (tok.text.size() == 1) {
            switch (tok.text[0]) {
            case '+': return Op::add;
            case '-': return Op::sub;
            case '*': return Op::mul;
            case '/': return Op::div;
            default: break;
            }
        }
        throw ParseError("unknown function symbol '" + tok.text + "'", tok.pos);
    }

    std::int32_t resolve_var(const Token& tok) {
        std::size_t k = 0;
        if (is_positional(tok.text, k)) {
            if (k < 1 || k > schema_.size())
                throw ParseError("variable '" + tok.text + "' out of range, have " +
                                     std::to_string(schema_.size()) + " features",
                                 tok.pos);
            return static_cast<std::int32_t>(k - 1);
        }
        for (std::size_t i = 0; i < schema_.size(); ++i)
            if (schema_[i] == tok.text)
                return static_cast<std::int32_t>(i);
        throw ParseError("unknown variable '" + tok.text + "'", tok.pos);
    }

    Lexer lexer_;
    std::span<const std::string> schema_;
    Token cur_;
};

} // namespace

GeneTree parse_sexpr(const std::string& text, std::span<const std::string> schema) {
    return Parser(text, schema).parse();
}

std::string print_sexpr(const GeneTree& tree) {
    std::string out;
    std::vector<std::size_t> open; // children still expected, for closing parens
    for (const ExprNode& n : tree.nodes) {
        if (!out.empty() && out.back() != '(')
            out += ' ';
        if (n.is_leaf()) {
            out += 'x';
            out += std::to_string(n.var + 1);
            while (!open.empty() && --open.back() == 0) {
                open.pop_back();
                out += ')';
            }
        } else {
            out += '(';
            out += op_symbol(n.op);
            open.push_back(2);
        }
    }
    return out;
}

namespace {

bool displayable_name(const std::string& name) {
    if (name.empty())
        return false;
    for (char c : name)
        if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')')
            return false;
    std::size_t k = 0;
    return !is_positional(name, k); // an x<digits> name would re-parse positionally
}

} // namespace

std::string print_sexpr_named(const GeneTree& tree,
                              std::span<const std::string> schema) {
    std::string out;
    std::vector<std::size_t> open;
    for (const ExprNode& n : tree.nodes) {
        if (!out.empty() && out.back() != '(')
            out += ' ';
        if (n.is_leaf()) {
            auto idx = static_cast<std::size_t>(n.var);
            if (idx < schema.size() && displayable_name(schema[idx])) {
                out += schema[idx];
            } else {
                out += 'x';
                out += std::to_string(n.var + 1);
            }
            while (!open.empty() && --open.back() == 0) {
                open.pop_back();
                out += ')';
            }
        } else {
            out += '(';
            out += op_symbol(n.op);
            open.push_back(2);
        }
    }
    return out;
}

namespace {

// Covers every tree up to ~124 nodes (stack peaks at the leaf count);
// larger parsed trees fall back to a heap stack.
constexpr std::size_t kStackCap = 64;

inline double apply(Op op, double a, double b) {
    switch (op) {
    case Op::add: return a + b;
    case Op::sub: return a - b;
    case Op::mul: return a * b;
    case Op::div: return b == 0.0 ? 1.0 : a / b; // protected division
    }
    return 0.0;
}

template <typename StackLike>
double eval_one(const GeneTree& tree, std::span<const double* const> columns,
                std::size_t sample, StackLike& stack) {
    // reverse prefix scan: leaves push, internal nodes pop (left, right)
    std::size_t top = 0;
    for (std::size_t j = tree.nodes.size(); j-- > 0;) {
        const ExprNode& n = tree.nodes[j];
        if (n.is_leaf()) {
            stack[top++] = columns[static_cast<std::size_t>(n.var)][sample];
        } else {
            double left = stack[--top];
            double right = stack[--top];
            stack[top++] = apply(n.op, left, right);
        }
    }
    return stack[0];
}

std::size_t max_stack_need(const GeneTree& tree) {
    // worst case: every other node pushes before ops consume
    return tree.nodes.size() / 2 + 2;
}

} // namespace

void eval_tree(const GeneTree& tree, std::span<const double* const> columns,
               std::size_t n_samples, double* out) {
    if (tree.nodes.empty())
        throw DataError("cannot evaluate an empty tree");
    std::int32_t max_var = tree.max_var_index();
    if (max_var >= 0 && static_cast<std::size_t>(max_var) >= columns.size())
        throw SchemaError("tree references feature index " + std::to_string(max_var + 1) +
                          " but only " + std::to_string(columns.size()) +
                          " feature columns are bound");
    if (max_stack_need(tree) <= kStackCap) {
        std::array<double, kStackCap> stack;
        for (std::size_t s = 0; s < n_samples; ++s)
            out[s] = eval_one(tree, columns, s, stack);
    } else {
        std::vector<double> stack(max_stack_need(tree));
        for (std::size_t s = 0; s < n_samples; ++s)
            out[s] = eval_one(tree, columns, s, stack);
    }
}

std::vector<double> eval_tree(const GeneTree& tree,
                              std::span<const double* const> columns,
                              std::size_t n_samples) {
    std::vector<double> out(n_samples);
    eval_tree(tree, columns, n_samples, out.data());
    return out;
}

double eval_tree_row(const GeneTree& tree, std::span<const double> row) {
    std::vector<const double*> columns(row.size());
    for (std::size_t i = 0; i < row.size(); ++i)
        columns[i] = &row[i];
    double out = 0.0;
    eval_tree(tree, columns, 1, &out);
    return out;
}

namespace {

void grow_into(GeneTree& tree, Rng& rng, std::size_t n_features, const FunctionSet& fs,
               std::size_t depth_left, GrowMethod method) {
    bool leaf;
    if (depth_left <= 1)
        leaf = true;
    else if (method == GrowMethod::full)
        leaf = false;
    else
        leaf = rng.bernoulli(0.5);
    if (leaf) {
        tree.nodes.push_back(
            ExprNode::leaf(static_cast<std::int32_t>(rng.uniform_index(n_features))));
        return;
    }
    tree.nodes.push_back(ExprNode::internal(fs.ops[rng.uniform_index(fs.ops.size())]));
    grow_into(tree, rng, n_features, fs, depth_left - 1, method);
    grow_into(tree, rng, n_features, fs, depth_left - 1, method);
}

} // namespace

GeneTree random_tree(Rng& rng, std::size_t n_features, const FunctionSet& fs,
                     std::size_t max_depth, GrowMethod method) {
    if (max_depth < 1)
        throw ConfigError("random_tree requires max_depth >= 1");
    if (n_features == 0)
        throw ConfigError("random_tree requires at least one feature");
    fs.validate();
    GeneTree tree;
    grow_into(tree, rng, n_features, fs, max_depth, method);
    return tree;
}

} // namespace mfgp
