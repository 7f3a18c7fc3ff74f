"""Reduced words, metric balls, and kernel fingerprints.

Words over a rank-d free group are the common currency of the whole library:
every group we touch is handed to us as a marking, i.e. a way of evaluating
words, and everything we can measure about it factors through which ball
words die under that evaluation.
"""

from stabilitylab.marked import alt_oracle, az_oracle
from stabilitylab.words import (ball_size, enumerate_ball, kernel_fingerprint,
                                word_from_string, word_to_string)

# Free reduction happens on construction; strings use a..z and A..Z.
w = word_from_string("abAAb", 2)
print("word       :", w, " length", len(w))
print("inverse    :", w.inverse())
print("w * w^-1   :", w * w.inverse())

# Balls enumerate every reduced word up to a radius, in length-lex order.
for radius in range(4):
    ball = enumerate_ball(2, radius)
    print(f"ball radius {radius}: {len(ball)} words "
          f"(closed form {ball_size(2, radius)})")
print("radius-2 ball:", " ".join(word_to_string(x) for x in enumerate_ball(2, 2)))

# A kernel fingerprint is the ball cut down to the words an oracle kills.
# The alternating group on 5 symbols kills a^5 (its first marking generator
# is a 5-cycle); the alternating enrichment of the integers does not, because
# there a is a genuine shift.
for oracle in (alt_oracle(2), az_oracle()):
    ws = kernel_fingerprint(oracle, 5)
    shown = sorted(word_to_string(x) for x in ws.members)
    print(f"{oracle.name:6s} kernel in B(5): {len(ws)} words, e.g. {shown[:6]}")
