def execute_command(image):
    image_patch = ImagePatch(image)
    clock_patches = image_patch.find('clock')
    if len(clock_patches) == 0:
        return {'function': 'None', 'error': 'No clock found.'}
    clock_patches.sort(key=lambda x: x.horizontal_center)
    middle_clock = clock_patches[len(clock_patches) // 2]
    return {'function': 'navigate_to_object', 'inputs': (middle_clock.horizontal_center, middle_clock.vertical_center), 'box': [middle_clock.left, middle_clock.lower, middle_clock.right, middle_clock.upper]}
