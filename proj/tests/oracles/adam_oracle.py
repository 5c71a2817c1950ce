# Reference trace of bias-corrected Adam on f(x) = sum x^2.
import math

x = [1.0, -2.0, 0.5]
m = [0.0] * 3
v = [0.0] * 3
b1, b2, eps, lr = 0.9, 0.999, 1e-8, 0.1
for t in range(1, 11):
    g = [2 * xi for xi in x]
    for i in range(3):
        m[i] = b1 * m[i] + (1 - b1) * g[i]
        v[i] = b2 * v[i] + (1 - b2) * g[i] ** 2
        x[i] -= lr * (m[i] / (1 - b1 ** t)) / (math.sqrt(v[i] / (1 - b2 ** t)) + eps)
print(", ".join(repr(a) for a in x))
