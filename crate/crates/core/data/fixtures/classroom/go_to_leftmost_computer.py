def execute_command(image):
    image_patch = ImagePatch(image)
    computer_patches = image_patch.find('computer')
    if len(computer_patches) == 0:
        return {'function': 'None', 'error': 'No computer found.'}
    computer_patches.sort(key=lambda x: x.horizontal_center)
    leftmost_computer = computer_patches[0]
    return {'function': 'navigate_to_object', 'inputs': (leftmost_computer.horizontal_center, leftmost_computer.vertical_center), 'box': [leftmost_computer.left, leftmost_computer.lower, leftmost_computer.right, leftmost_computer.upper]}
