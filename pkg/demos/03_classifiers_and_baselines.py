"""The classifier suite and the filter baselines it is compared against.

All four classifiers are deterministic given (kind, matrix, seed). The
filter rankers score features from counts alone; the top-k of a ranking is
the classic cheap alternative to wrapper selection.
"""

from rlselect import (
    ClassifierKind,
    SplitKind,
    SyntheticSpec,
    chi_square,
    cv_accuracy,
    generate_synthetic,
    information_gain,
    stratified_split,
    top_k,
)

matrix = generate_synthetic(
    SyntheticSpec(n_samples=1500, n_features=30, informative=(1, 7, 19), q=0.8, seed=3)
)
plan = stratified_split(matrix, SplitKind.kfold(10), seed=9)

print("10-fold CV accuracy on the full 30-feature matrix:")
for kind in (ClassifierKind.decision_tree(), ClassifierKind.random_forest(trees=30),
             ClassifierKind.knn(k=5), ClassifierKind.linear_svm()):
    mean, _ = cv_accuracy(kind, matrix, plan, seed=0)
    print(f"  {kind.label():>12s}: {mean:.3f}")

ig = information_gain(matrix)
chi = chi_square(matrix)
print(f"\ninformation-gain top 5: {top_k(ig, 5)}")
print(f"chi-square top 5:       {top_k(chi, 5)}")
print(f"planted informative features: (1, 7, 19)")
print(f"IG scores there: {[round(float(ig.scores[j]), 4) for j in (1, 7, 19)]}")
print(f"best noise IG score: {max(float(ig.scores[j]) for j in range(30) if j not in (1, 7, 19)):.4f}")
