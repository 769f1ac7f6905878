/** Instruction composer: user selections in, expression wire JSON out.
 *
 * The service takes binary and/or nodes, so multiple selections fold
 * left-associatively.  An empty selection composes to null (submit disabled).
 */

import type { ExpressionJson } from "./types.js";

export interface SelectedSentence {
  text: string;
  negated: boolean;
}

export interface ComposerState {
  selections: SelectedSentence[];
  connective: "and" | "or";
  negateRoot: boolean;
}

export function emptyComposer(): ComposerState {
  return { selections: [], connective: "and", negateRoot: false };
}

function literal(selection: SelectedSentence): ExpressionJson {
  const leaf: ExpressionJson = { op: "leaf", text: selection.text };
  return selection.negated ? { op: "not", children: [leaf] } : leaf;
}

export function composeExpression(state: ComposerState): ExpressionJson | null {
  if (state.selections.length === 0) return null;
  let expr = literal(state.selections[0]);
  for (const selection of state.selections.slice(1)) {
    expr = { op: state.connective, children: [expr, literal(selection)] };
  }
  if (state.negateRoot) expr = { op: "not", children: [expr] };
  return expr;
}

/** Compact text form for showing the pending instruction. */
export function describeExpression(expr: ExpressionJson): string {
  if (expr.op === "leaf") return `"${expr.text}"`;
  if (expr.op === "not") return `not ${describeExpression(expr.children[0])}`;
  const parts = expr.children.map(describeExpression);
  return `(${parts.join(` ${expr.op} `)})`;
}
