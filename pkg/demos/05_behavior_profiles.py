"""Walkthrough: per-dialog behavioral profiles.

Computes cue rates (agreement / disagreement / hedging), lexical repetition,
and sentiment for a few hand-written dialogs.  Toxicity is omitted here
because it needs an external classifier endpoint.
"""

from coreval import behavior_profile
from coreval.corpus import Dialog, Utterance


def dialog(dialog_id, texts):
    return Dialog(id=dialog_id, condition="neutral", agent_a="demo", agent_b="demo",
                  utterances=tuple(
                      Utterance(dialog_id=dialog_id, turn_index=i,
                                agent="A" if i % 2 == 0 else "B", text=t)
                      for i, t in enumerate(texts)))


SAMPLES = {
    "agreeable": dialog("agree", [
        "I think we should split the work, sounds good?",
        "Absolutely, great idea! I agree completely.",
        "Exactly. Yes, that works perfectly for me.",
    ]),
    "combative": dialog("fight", [
        "Your plan is wrong and it will fail badly.",
        "No, you are wrong. That analysis is nonsense.",
        "I disagree. However you spin it, it is a terrible mistake.",
    ]),
    "hedging": dialog("hedge", [
        "Maybe we could perhaps try something, possibly next week?",
        "I guess it might work, kind of hard to say.",
        "I think so. Probably. Not sure though.",
    ]),
    "repetitive": dialog("loop", [
        "I have a great deal for you today.",
        "I have a great deal for you today.",
        "I have a great deal for you today.",
    ]),
}

print(f"{'dialog':<12} {'repeat':>7} {'agree':>7} {'disagree':>9} {'hedge':>7} {'sentiment':>10}")
for name, d in SAMPLES.items():
    p = behavior_profile(d, ngram_n=3)
    print(f"{name:<12} {p.repetition_rate:>7.3f} {p.agreement_rate:>7.3f} "
          f"{p.disagreement_rate:>9.3f} {p.hedging_rate:>7.3f} {p.sentiment:>10.3f}")

print("\nLexicons are plain text files; pass --agreement-lexicon etc. to the")
print("`coreval behavior` subcommand to swap in your own.")
