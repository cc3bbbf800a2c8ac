from .strings import format_complex as format_complex
from .strings import format_fixed as format_fixed
from .strings import format_mantissa as format_mantissa
from .strings import kebab_to_snake as kebab_to_snake
from .strings import snake_to_title as snake_to_title
from .parallel import run_cells as run_cells
