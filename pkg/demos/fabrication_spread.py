"""How fabrication spread moves a device across a tongue edge.

The device sits just outside the primary tongue.  Drawing E_J and E_C with
growing relative spread shows the unstable fraction climbing from zero.

    python demos/fabrication_spread.py
"""

from cqed_tongues.circuits import CircuitParams
from cqed_tongues.stability import McSpec, fabrication_scan

base = CircuitParams(1.0, 0.3)
for sigma in (0.0, 0.01, 0.02, 0.05, 0.1):
    spec = McSpec(base, sigma, sigma, samples=400, seed=3, drive=(0.2875, 2.0, 0.0))
    res = fabrication_scan(spec)
    print(f"relative spread {sigma:4.2f}: unstable fraction {res.unstable_fraction:.3f}, rejections {res.rejections}")
