"""Write SVG pictures of the Farey and Bary partitions side by side."""

import argparse
from pathlib import Path

from fareybary.render import RenderSpec, render_partition


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="figures")
    ap.add_argument("--depth", type=int, default=4)
    ap.add_argument("--fill", choices=("none", "depth-shaded"), default="depth-shaded")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [("continuous", None), ("weighted", (1, 1, 1)), ("weighted", (3, 2, 1)), ("weighted", (1, 1, 2))]
    for map_name, w in jobs:
        depth = args.depth if map_name == "weighted" else min(args.depth, 4)
        for side in ("farey", "bary"):
            spec = RenderSpec(map=map_name, side=side, depth=depth, weights=w, fill=args.fill)
            tag = map_name if w is None else f"{map_name}_{''.join(map(str, w))}"
            path = out / f"{tag}_{side}_d{depth}.svg"
            path.write_text(render_partition(spec))
            print(path)


if __name__ == "__main__":
    main()
