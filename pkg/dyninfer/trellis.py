"""
Unrolled observation-transition diagram of a solved problem.

Nodes are (round, observation) pairs annotated with V*; every estimate
leaves a node along one edge per reachable next observation. The chosen
estimate's edges are solid, the others dashed, and chosen edges that differ
from the single-round Bayes estimate are drawn blue.

Render with graphviz:

    dot -Tpng -O trellis.gv
"""
import pandas as pd

from dyninfer.exceptions import MismatchedResult

DOT_DECIMALS = 4


class TrellisNode:
    def __init__(self, round, x, v_star, yhat, myopic, tie):
        self.round = round
        self.x = x
        self.v_star = v_star
        self.yhat = yhat
        self.myopic = myopic
        self.tie = tie

    def __str__(self):
        return str(self.__dict__)


class TrellisEdge:
    def __init__(self, round, x, yhat, next_x, probability, chosen, deviation):
        self.round = round
        self.x = x
        self.yhat = yhat
        self.next_x = next_x
        self.probability = probability
        self.chosen = chosen
        self.deviation = deviation

    def __str__(self):
        return str(self.__dict__)


class TrellisDocument:
    def __init__(self, n, nodes, edges):
        self.n = n
        self.nodes = nodes
        self.edges = edges

    def deviation_edges(self):
        return [edge for edge in self.edges if edge.deviation]


def build_trellis(problem, result):
    if not result.matches(problem):
        raise MismatchedResult("result does not belong to this problem")

    nodes = []
    edges = []
    for r in range(problem.n):
        for a, x in enumerate(problem.x_space):
            chosen_c = result.policy[r, a]
            myopic_c = result.myopic[r, a]
            nodes.append(TrellisNode(r + 1, x, float(result.v_star[r, a]),
                                     problem.yhat_space.label(chosen_c), problem.yhat_space.label(myopic_c),
                                     len(result.tie_sets[r][a]) > 1))
            if r == problem.n - 1:
                continue
            kernel = problem.transition_array[r]
            for c, yhat in enumerate(problem.yhat_space):
                for b, x_next in enumerate(problem.x_space):
                    p = float(kernel[a, c, b])
                    if p <= 0.0:
                        continue
                    chosen = c == chosen_c
                    edges.append(TrellisEdge(r + 1, x, yhat, x_next, p, chosen, chosen and chosen_c != myopic_c))
    return TrellisDocument(problem.n, nodes, edges)


def _escape(label):
    return label.replace("\\", "\\\\").replace('"', '\\"')


def _node_id(round, x):
    return '"r%d_%s"' % (round, _escape(x))


def to_dot(document, decimals=DOT_DECIMALS):
    lines = ["digraph trellis {", "    rankdir=LR;", "    node [shape=circle];"]
    for i in range(1, document.n + 1):
        lines.append("    subgraph round_%d {" % i)
        lines.append("        rank=same;")
        for node in document.nodes:
            if node.round != i:
                continue
            lines.append('        %s [label="x=%s\\nV*=%.*f"];' % (_node_id(node.round, node.x), _escape(node.x), decimals, node.v_star))
        lines.append("    }")
    for edge in document.edges:
        attributes = ['label="yhat=%s p=%.*f"' % (_escape(edge.yhat), decimals, edge.probability),
                      "style=%s" % ("solid" if edge.chosen else "dashed")]
        if edge.deviation:
            attributes.append("color=blue")
        lines.append("    %s -> %s [%s];" % (_node_id(edge.round, edge.x), _node_id(edge.round + 1, edge.next_x),
                                             ", ".join(attributes)))
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_text(document, decimals=DOT_DECIMALS):
    frame = pd.DataFrame([(node.round, node.x, node.v_star, node.yhat, node.myopic, "yes" if node.tie else "no")
                          for node in document.nodes],
                         columns=["round", "x", "V*", "yhat*", "myopic", "tie"])
    return frame.to_string(index=False, formatters={"V*": lambda v: "%.*f" % (decimals, v)}) + "\n"


def export_trellis(problem, result, fmt="dot", decimals=DOT_DECIMALS):
    document = build_trellis(problem, result)
    if fmt == "dot":
        return to_dot(document, decimals)
    if fmt == "text":
        return to_text(document, decimals)
    raise ValueError("unknown trellis format %r" % fmt)
