"""Solution counts of g(shift window) = g(window) + c over Z/n, for every
offset c. Only c = 0 has solutions (the n constant maps)."""
from adbundle.profinite import shift_count

print("w n offset left right")
for w in range(1, 4):
    for n in range(2, 5):
        for c in range(n):
            print(w, n, c, shift_count(w, n, c, "left"), shift_count(w, n, c, "right"))
