#!/usr/bin/env python3
"""Regenerates the bundled page fixtures (screenshot.png + layout.json).

The outputs are committed; rerun only when the fixture design changes,
then refresh the golden element file with:
  ./build/tools/ggb harvest fixtures --dir tests/fixtures/pages \
      --out /tmp/harvest && cp /tmp/harvest/elements.jsonl \
      tests/fixtures/golden_elements.jsonl
"""

import json
import os
import random

from PIL import Image

HERE = os.path.dirname(os.path.abspath(__file__))
PAGES = os.path.join(HERE, "pages")

WORDS = [
    "Home", "Search", "Login", "Cart", "Checkout", "Profile", "Settings",
    "Help", "About", "Contact", "News", "Deals", "Orders", "Wishlist",
    "Sign up", "Log out", "Back", "Next", "Submit", "Cancel",
]
TITLES = [
    "Search icon", "Menu icon", "Close dialog", "Open notifications",
    "User avatar", "Shopping cart", "Toggle dark mode", "Play video",
]


def make_page(idx: int, rng: random.Random) -> None:
    width, height = rng.choice([(1920, 1080), (1280, 720), (375, 812)])
    nodes = []
    node_id = 0
    for _ in range(rng.randint(6, 14)):
        w = rng.randint(20, width // 4)
        h = rng.randint(12, 80)
        left = rng.randint(0, width - w)
        top = rng.randint(0, height - h)
        bbox = [left, top, left + w, top + h]
        kind = rng.random()
        node = {"id": node_id, "bbox": bbox, "text": "", "title": "", "visible": True}
        if kind < 0.55:
            node["text"] = rng.choice(WORDS)
        elif kind < 0.8:
            node["title"] = rng.choice(TITLES)
        elif kind < 0.9:
            node["text"] = rng.choice(WORDS)
            node["visible"] = False  # display:none
        else:
            node["text"] = "   "  # whitespace only, dropped by cleaning
        nodes.append(node)
        node_id += 1
    # one guaranteed duplicate pair and one zero-area node per page
    if nodes:
        dup = dict(nodes[0])
        dup["id"] = node_id
        nodes.append(dup)
        node_id += 1
    nodes.append({"id": node_id, "bbox": [10, 10, 10, 30], "text": "zero width",
                  "title": "", "visible": True})

    page_dir = os.path.join(PAGES, f"page{idx:02d}")
    os.makedirs(page_dir, exist_ok=True)
    layout = {
        "url": f"https://example.test/page{idx:02d}",
        "width": width,
        "height": height,
        "nodes": nodes,
    }
    with open(os.path.join(page_dir, "layout.json"), "w") as f:
        json.dump(layout, f, indent=1)
        f.write("\n")
    img = Image.new("RGB", (width, height), (240, 240, 240))
    img.save(os.path.join(page_dir, "screenshot.png"))


def main() -> None:
    rng = random.Random(20240817)
    for idx in range(20):
        make_page(idx, rng)
    # shared tiny screenshot used by synthetic eval fixtures
    Image.new("RGB", (4, 4), (10, 20, 30)).save(os.path.join(HERE, "tiny.png"))


if __name__ == "__main__":
    main()
