"""Plot a CSV written by ``coulomb-extremes cdf`` or ``compare``.

Usage: python scripts/plot_curve.py curve.csv [out.png]

Needs matplotlib, which the package itself does not depend on.
"""
import sys

import matplotlib.pyplot as plt

from coulomb_extremes import io


def main(path, out=None):
    with open(path) as fh:
        t = io.read_csv(fh)
    x = t.column("Y")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for name, style in (("F_exact", "-"), ("F_gumbel", "--"), ("F_phi", ":")):
        if name in t.columns:
            ax.plot(x, t.column(name), style, label=name)
    ax.set_xlabel("Y")
    ax.set_ylabel("CDF")
    ax.set_title(f"{t.meta.get('potential')}  N={t.meta.get('N')}  {t.meta.get('edge')}")
    ax.legend()
    fig.tight_layout()
    if out:
        fig.savefig(out, dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main(*sys.argv[1:3])
