"""
Edit-level scoring of a correction system
=========================================

Hypothesis edits are matched exactly against gold edits; counts are
accumulated over the corpus and summarized as precision, recall and the
precision-weighted F0.5.
"""

from gecsyntax import align, corpus_score, f_beta

corpus = [
    # (source, system output, gold correction)
    ("I has a cat", "I have a cat", "I have a cat"),
    ("the the dog ran", "the dog ran", "the dog ran"),
    ("she walk home", "she walk home", "she walks home"),   # missed edit
    ("he eat an apple", "he ate a apple", "he eats an apple"),  # wrong fix
]

pairs = []
for source, system, gold in corpus:
    src = source.split()
    pairs.append((align(src, system.split()), align(src, gold.split())))

scores = corpus_score(pairs)
print(scores.summary())
print(scores.to_json())

# F0.5 weighs precision twice as heavily as recall: a cautious system
# with P=0.75, R=0.5 scores much better than the reverse.
print("P=0.75 R=0.50 ->", round(f_beta(0.75, 0.50), 4))
print("P=0.50 R=0.75 ->", round(f_beta(0.50, 0.75), 4))
