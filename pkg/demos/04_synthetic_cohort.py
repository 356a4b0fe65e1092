"""End-to-end analysis of a synthetic cohort with planted coupling."""
from hypofhr import EventKind, SynthConfig, generate_cohort
from hypofhr.pipeline import analyze
from hypofhr.synth import null_config

config = SynthConfig(n_participants=20, hours=8, coupling_prob=0.7, centers=("A", "B"), seed=1)
cohort = generate_cohort(config)
planted = sum(len(sr.hypoxia) for sr in cohort)
coupled = sum(p.coupled for sr in cohort for p in sr.hypoxia)
print(f"{planted} hypoxic events planted, {coupled} with a triggered acceleration")

result = analyze([sr.recording for sr in cohort])
for kind, chi in result.chi_square.items():
    if chi.test is not None:
        print(f"{kind.value}: chi2 = {chi.test.statistic:.0f}, p = {chi.test.p_value:.2g}, "
              f"OR = {chi.table.odds_ratio():.1f}")

print("\nunivariate logistic fits, outcome = any link")
for outcome, rows in result.glm.items():
    if outcome.value != "AnyLink":
        continue
    for row in rows:
        f = row.fit
        print(f"  {row.feature:<12} coef {f.beta1:+.4f}  se {f.se1:.4f}  z {f.z1:+.2f}  p {f.p1:.3f}")

print("\nfeature means by center")
for row in result.features:
    (la, (ma, sa, na)), (lb, (mb, sb, nb)) = sorted(row.groups.items())
    print(f"  {row.feature:<12} {la} {ma:7.2f}+-{sa:<6.2f} {lb} {mb:7.2f}+-{sb:<6.2f} t = {row.test.statistic:+.2f}")

gm = result.phase.grand_means
print("\nFHR mean pre -> during -> post:",
      " -> ".join(f"{gm[p]['mean']:.1f}" for p in ("pre", "during", "post")))

# without coupling the acceleration chi-square still rejects: seconds are
# not independent and the link window is wider than an acceleration
null = analyze([sr.recording for sr in generate_cohort(null_config(config))])
chi = null.chi_square[EventKind.ACCELERATION]
print(f"\nnull cohort: chi2 = {chi.test.statistic:.0f}, OR = {chi.table.odds_ratio():.1f}")
