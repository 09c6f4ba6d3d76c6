"""
Entanglement versus classical bits
==================================

The truncated quantum protocol needs ceil(log2 t) entangled qubits per
party.  A naive classical protocol draws S from shared randomness and sends
it to Bob.  The classical side is an upper bound only.
"""

from qsampler import ProblemInstance
from qsampler.baseline import gap_report, naive_protocol, naive_protocol_distribution
from qsampler.protocol import exact_chi_distribution, tvd

###############################################################################
# One run of the classical protocol.

inst = ProblemInstance(6, 2)
trace = naive_protocol(inst, seed=3)
S, T = trace.output
print("message:", trace.message, "->", S.elements, " Bob outputs", T.elements)
print("bits:", trace.comm_bits, "communicated,", trace.shared_bits_consumed, "shared")

###############################################################################
# Enumerating every branch shows that its output law is exactly uniform.

print("exact TVD to uniform:", tvd(naive_protocol_distribution(inst), exact_chi_distribution(inst)))

###############################################################################
# Side by side for growing instances at eps = 0.1.

print("n  k  qubits  comm  shared")
for n, k in [(9, 3), (16, 4), (25, 5), (36, 6), (49, 7)]:
    row = gap_report(ProblemInstance(n, k), 0.1)
    print(f"{n:<3}{k:<3}{row['quantum_qubits']:<8}{row['classical_comm_bits']:<6}{row['classical_shared_bits']}")
