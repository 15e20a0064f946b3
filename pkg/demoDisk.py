from pysteklov import *
from time import time_ns

time0 = time_ns()

# Unit disk, 256 Nyström nodes
domain = Domain.disk(1.0)
operators = LayerOperators.assemble(domain, N=256)
spectrum = operators.solve(nModes=81)
time1 = time_ns()
print(f"Spectrum         ::  {(time1-time0)/1000000000}s")

reference = diskSpectrumEntries(1.0, 81)
for entry in reference[:6]:
    print("k={0:2d}  sigma_ref={1:.12f}  computed={2:.12f}".format(entry.index, entry.sigma,
                                                                  spectrum.nearest(entry.sigma).sigma))

# Rotating mode e^{ikθ} with k = 40 and its decay along the ray from θ = 0
mode = spectrum.rotatingMode(int(np.argmin(np.abs(spectrum.sigmas - 40))))
field = ExtensionField(mode, upsampling=8, threads=0)
profile = sampleNormalRay(field, 0.0, np.linspace(0.02, 0.2, 19)).fit(degree=TAYLOR_DEGREE)
time2 = time_ns()
print(f"Decay fit        ::  {(time2-time1)/1000000000}s")

law = exactDecayLaw("disk", R=1.0)
print("a1={0:.6f} a2={1:.6f} (exact a2 = {2})".format(profile.a1, profile.a2, law.quadratic))
print(verifyTheorem1(domain, mode, [profile]).summary()["passed"])

table = fbiOfComputedMode(mode, PhaseSpaceGrid())
print("Mass in 0.5 <= |xi| <= 1.5: {0:.6f}".format(table.massFraction(0.5, 1.5)))
profile.display(law)
table.display()
