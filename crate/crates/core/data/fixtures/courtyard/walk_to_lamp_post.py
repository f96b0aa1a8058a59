def execute_command(image):
    image_patch = ImagePatch(image)
    lamp_patches = image_patch.find('lamp post')
    if len(lamp_patches) == 0:
        return {'function': 'None', 'error': 'No lamp post found.'}
    lamp = lamp_patches[0]
    return {'function': 'navigate_to_object', 'inputs': (lamp.horizontal_center, lamp.vertical_center), 'box': [lamp.left, lamp.lower, lamp.right, lamp.upper]}
