"""
Wall maps for the built-in grid environments.

'#' marks a wall cell, '.' a free cell. Layouts are versioned: a change to a
map gets a new constant and a new registry entry, never an in-place edit.
"""

# 11x11 four-rooms: a vertical wall in column 5 with doorways in rows 2 and 9,
# horizontal walls in row 5 (left rooms, doorway at column 1) and row 6
# (right rooms, doorway at column 8).
FOUR_ROOMS_V1 = (
    ".....#.....",
    ".....#.....",
    "...........",
    ".....#.....",
    ".....#.....",
    "#.####.....",
    ".....###.##",
    ".....#.....",
    ".....#.....",
    "...........",
    ".....#.....",
)

LAYOUTS = {
    "four-rooms": FOUR_ROOMS_V1,
}


def parse_layout(rows):
    """
    Convert a layout into a wall bitmap.

    Args:
        rows: Sequence of equal-length strings

    Returns:
        Tuple of (width, height, walls) where walls is a list of lists of bools
    """
    height = len(rows)
    width = len(rows[0]) if height else 0
    if any(len(r) != width for r in rows):
        raise ValueError("layout rows must all have the same width")
    walls = [[ch == "#" for ch in row] for row in rows]
    return width, height, walls
