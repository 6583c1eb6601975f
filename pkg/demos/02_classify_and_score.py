"""
Lexicon classification and dictionary sentiment on raw text
===========================================================

Runs the multi-label taxonomy matcher and the sentiment scorer over a
few hand-written messages using the bundled demonstration term lists.
The demo lists are small and illustrative; real studies should supply
their own lexicon files in the same two-column CSV format.
"""

from esgrisk.demodata import demo_esg_lexicon_path, demo_sentiment_lexicon_path
from esgrisk.lexicon import EsgClassifier, load_esg_lexicon, tokenize
from esgrisk.sentiment import SentimentScorer, load_sentiment_lexicon
from esgrisk.taxonomy import Node, ancestors, node_sort_key

classifier = EsgClassifier(load_esg_lexicon(demo_esg_lexicon_path()))
scorer = SentimentScorer(load_sentiment_lexicon(demo_sentiment_lexicon_path()))

MESSAGES = [
    "Regulators probe the refinery oil spill, toxic waste found downstream",
    "CEO pay package approved despite investor revolt over board independence",
    "Great quarter! Strong growth and an upbeat outlook",
    "Factory workers strike over unsafe conditions and wage theft claims",
    "carbon emissions target, clean energy pledge praised by analysts",
    "Lunch was fine.",
]

for text in MESSAGES:
    tokens = tokenize(text)
    labeled = classifier.classify_tokens("demo", tokens)
    score = scorer.score_tokens(tokens)
    nodes = sorted(labeled.nodes, key=node_sort_key)
    print(f"text:      {text}")
    print(f"tokens:    {tokens}")
    print(f"nodes:     {[n.value for n in nodes] or '(none, message is ignored downstream)'}")
    if labeled.matched_terms:
        print(f"matched:   {list(labeled.matched_terms)}")
    print(f"sentiment: {score:+.3f}\n")

# a message tagged with a subcategory also counts toward its pillar and
# the all-ESG rollup when daily series are built; the classifier itself
# reports only the directly matched nodes
spill = classifier.classify_tokens("demo", tokenize("another oil spill"))
print("direct labels for 'another oil spill':", sorted(n.value for n in spill.nodes))
print("rollup happens at aggregation:", [n.value for n in ancestors(Node.POLLUTION_AND_WASTE)])
