from rich.console import Console
from rich.theme import Theme

# status styles shared by the command reports
console = Console(
    theme=Theme({'ok': 'bold green', 'fail': 'bold red', 'path': 'bold magenta', 'suite': 'cyan'}),
    soft_wrap=True,
)
