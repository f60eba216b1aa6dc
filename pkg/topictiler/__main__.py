from topictiler.cli import run

run()
