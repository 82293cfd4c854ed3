from rache.cli import main

main()
