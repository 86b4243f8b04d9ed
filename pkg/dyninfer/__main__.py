from dyninfer.cli import main

main()
