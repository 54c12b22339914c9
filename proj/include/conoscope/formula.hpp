#ifndef CONOSCOPE_FORMULA_HPP
#define CONOSCOPE_FORMULA_HPP

#include "conoscope/poly.hpp"

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace cono {

enum class RelOp { Lt, Le, Eq, Ne, Ge, Gt };

RelOp negate_op(RelOp op);
bool eval_op(int sign, RelOp op);
std::string op_text(RelOp op);

enum class NodeKind { Atom, RelAtom, Not, And, Or, Implies, Exists, Forall, True, False };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

// One node of a formula tree. Polynomials inside atoms live in the owning
// Formula's variable space.
struct Node {
    NodeKind kind;
    Polynomial poly;            // Atom: constraint poly relop 0
    RelOp op = RelOp::Eq;       // Atom
    std::string rel;            // RelAtom
    std::vector<int> args;      // RelAtom argument variables
    std::vector<NodePtr> kids;  // Not(1), And/Or(n), Implies(2), quantifier(1)
    int var = -1;               // quantified variable
};

NodePtr mk_true();
NodePtr mk_false();
NodePtr mk_atom(Polynomial p, RelOp op);
NodePtr mk_rel(std::string name, std::vector<int> args);
NodePtr mk_not(NodePtr a);
NodePtr mk_and(std::vector<NodePtr> kids);
NodePtr mk_or(std::vector<NodePtr> kids);
NodePtr mk_implies(NodePtr a, NodePtr b);
NodePtr mk_quant(bool forall, int var, NodePtr body);

// Database schema: relation name -> arity.
using Schema = std::map<std::string, int>;

// First-order formula over the ordered real field, with named relation slots.
// `vars` is the full variable table (free and bound); atom polynomials have
// nvars == vars.size().
struct Formula {
    std::vector<std::string> vars;
    NodePtr root;

    int nvars() const { return (int)vars.size(); }
    std::set<int> free_vars() const;
    std::set<std::string> relation_names() const;
    bool quantifier_free() const;

    std::string to_string() const;
    bool structurally_equal(const Formula& o) const;
};

// A concrete semi-algebraic set: relation-free formula whose free variables
// are exactly x1..xn.
struct SetDescription {
    int n = 0;
    Formula formula;

    static SetDescription make(int n, Formula f);  // validates free variables
};

struct ParseError : std::runtime_error {
    int line, column;
    ParseError(const std::string& msg, int line, int column);
};

// Parses the .saf language. The schema, when given, is used for relation
// arity checks; unknown relations are an error if a schema is supplied.
Formula parse_formula(const std::string& text, const Schema* schema = nullptr);

// Replaces every atom of the given relation by body, binding body's free
// variables x1..xk to the atom's arguments (capture-avoiding).
Formula substitute_relation(const Formula& phi, const std::string& name,
                            const Formula& psi);

// Prenex normal form; requires a relation-free formula.
Formula to_prenex(const Formula& phi);

// Renames bound variables apart and gives every variable a unique name.
Formula normalize_bound(const Formula& phi);

// Rebuilds a node over a new variable table: idx[v] = new slot of old var v
// (-1 allowed for variables the node does not use).
NodePtr remap_vars(const NodePtr& n, int new_nvars, const std::vector<int>& idx);

enum class ExportFormat { Native, Smt };
std::string export_formula(const Formula& phi, ExportFormat fmt);

// Structural simplification: constant folding, flattening, dedup.
Formula simplify(const Formula& phi);
NodePtr simplify_node(const NodePtr& n, int nvars);

} // namespace cono

#endif
