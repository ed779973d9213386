from gramnoise.cli import main

main()
